#pragma once

// Run configuration for the pipeline driver: JSON in, resolved geometry and
// grid out.  Validation errors name the offending key.  Defaults applied on
// resolve: N_phi = round(2*pi*R), N_rho from Q when given, grid center at
// the standard placement outside the detector disc.

#include <optional>
#include <string>

#include <json.hpp>

#include "dcart/geometry.hpp"
#include "dcart/image.hpp"

namespace dcart {

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    double R{0.0};
    double rho_max{0.0};
    std::optional<double> q;    // exactly one of q / n_rho
    std::optional<int> n_rho;
    std::optional<int> n_phi;   // default round(2*pi*R)
    double arc_step{1.0};
    double epsilon{1.0};

    int grid_n{0};
    double pixel_size{1.0};
    std::optional<Point2> center;  // default: default_grid_center

    std::string phantom;  // shepp-logan | derenzo | bars
    std::optional<double> snr_db;
    std::optional<std::uint64_t> seed;
    std::string output_dir{"."};

    bool operator==(const RunConfig& o) const {
        const auto c_eq = [](const std::optional<Point2>& a, const std::optional<Point2>& b) {
            if (a.has_value() != b.has_value())
                return false;
            return !a || (a->x == b->x && a->y == b->y);
        };
        return R == o.R && rho_max == o.rho_max && q == o.q && n_rho == o.n_rho &&
               n_phi == o.n_phi && arc_step == o.arc_step && epsilon == o.epsilon &&
               grid_n == o.grid_n && pixel_size == o.pixel_size && c_eq(center, o.center) &&
               phantom == o.phantom && snr_db == o.snr_db && seed == o.seed &&
               output_dir == o.output_dir;
    }

    int resolved_n_phi() const {
        return n_phi ? *n_phi : SystemGeometry::default_n_phi(R);
    }

    SystemGeometry resolved_geometry() const {
        SystemGeometry g;
        g.R = R;
        g.rho_max = rho_max;
        g.n_phi = resolved_n_phi();
        g.n_rho = n_rho ? *n_rho : SystemGeometry::n_rho_from_q(*q, grid_n, g.n_phi);
        g.arc_step = arc_step;
        g.epsilon = epsilon;
        try {
            g.validate();
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("config: geometry: ") + e.what());
        }
        return g;
    }

    ImageGrid resolved_grid() const {
        ImageGrid grid;
        grid.n = grid_n;
        grid.pixel_size = pixel_size;
        grid.center = center ? *center : default_grid_center(R, grid_n, pixel_size);
        try {
            grid.validate();
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("config: grid: ") + e.what());
        }
        return grid;
    }

    void validate() const {
        if (!(R > 0.0))
            throw config_error("config: geometry.R must be > 0");
        if (!(rho_max > R))
            throw config_error("config: geometry.rho_max must be > R");
        if (q.has_value() == n_rho.has_value())
            throw config_error("config: exactly one of geometry.q / geometry.n_rho is required");
        if (q && !(*q > 0.0))
            throw config_error("config: geometry.q must be > 0");
        if (n_rho && *n_rho < 1)
            throw config_error("config: geometry.n_rho must be >= 1");
        if (n_phi && *n_phi < 1)
            throw config_error("config: geometry.n_phi must be >= 1");
        if (!(arc_step > 0.0))
            throw config_error("config: geometry.arc_step must be > 0");
        if (!(epsilon >= 0.0))
            throw config_error("config: geometry.epsilon must be >= 0");
        if (grid_n < 2)
            throw config_error("config: grid.n must be >= 2");
        if (!(pixel_size > 0.0))
            throw config_error("config: grid.pixel_size must be > 0");
        if (phantom != "shepp-logan" && phantom != "derenzo" && phantom != "bars")
            throw config_error("config: phantom must be one of shepp-logan|derenzo|bars");
        if (snr_db && !std::isfinite(*snr_db))
            throw config_error("config: snr_db must be finite");
        (void)resolved_geometry();
        (void)resolved_grid();
    }
};

inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json g{{"R", c.R}, {"rho_max", c.rho_max}, {"arc_step", c.arc_step},
                     {"epsilon", c.epsilon}};
    if (c.q)
        g["q"] = *c.q;
    if (c.n_rho)
        g["n_rho"] = *c.n_rho;
    if (c.n_phi)
        g["n_phi"] = *c.n_phi;
    nlohmann::json grid{{"n", c.grid_n}, {"pixel_size", c.pixel_size}};
    if (c.center)
        grid["center"] = {c.center->x, c.center->y};
    nlohmann::json j{{"geometry", g}, {"grid", grid}, {"phantom", c.phantom},
                     {"output_dir", c.output_dir}};
    if (c.snr_db)
        j["snr_db"] = *c.snr_db;
    if (c.seed)
        j["seed"] = *c.seed;
    return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        const auto& g = j.at("geometry");
        c.R = g.at("R").get<double>();
        c.rho_max = g.at("rho_max").get<double>();
        if (g.contains("q"))
            c.q = g.at("q").get<double>();
        if (g.contains("n_rho"))
            c.n_rho = g.at("n_rho").get<int>();
        if (g.contains("n_phi"))
            c.n_phi = g.at("n_phi").get<int>();
        if (g.contains("arc_step"))
            c.arc_step = g.at("arc_step").get<double>();
        if (g.contains("epsilon"))
            c.epsilon = g.at("epsilon").get<double>();
        const auto& grid = j.at("grid");
        c.grid_n = grid.at("n").get<int>();
        if (grid.contains("pixel_size"))
            c.pixel_size = grid.at("pixel_size").get<double>();
        if (grid.contains("center")) {
            const auto& ctr = grid.at("center");
            c.center = Point2{ctr.at(0).get<double>(), ctr.at(1).get<double>()};
        }
        c.phantom = j.at("phantom").get<std::string>();
        if (j.contains("snr_db"))
            c.snr_db = j.at("snr_db").get<double>();
        if (j.contains("seed"))
            c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_dir"))
            c.output_dir = j.at("output_dir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace dcart
