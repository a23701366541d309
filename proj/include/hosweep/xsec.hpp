// Material cross sections: per-region tables or analytic fields.
#pragma once

#include "hosweep/mesh.hpp"

#include <functional>
#include <map>
#include <stdexcept>

namespace hosweep {

struct CrossSections {
    double sigma_t = 0.0;  // total [1/cm]
    double sigma_s = 0.0;  // scattering [1/cm]
};

/// sigma_t(x) and sigma_s(x), either constant per mesh region attribute or
/// analytic callables (used for manufactured solutions). Always satisfies
/// sigma_t >= sigma_s >= 0.
class CrossSectionField {
  public:
    static CrossSectionField by_region(std::map<int, CrossSections> table) {
        for (const auto& [region, xs] : table) validate(xs, region);
        CrossSectionField f;
        f.table_ = std::move(table);
        return f;
    }

    static CrossSectionField constant(double sigma_t, double sigma_s) {
        return by_region({{0, {sigma_t, sigma_s}}});
    }

    static CrossSectionField analytic(std::function<double(const Vec2&)> sigma_t,
                                      std::function<double(const Vec2&)> sigma_s) {
        CrossSectionField f;
        f.sigma_t_fn_ = std::move(sigma_t);
        f.sigma_s_fn_ = std::move(sigma_s);
        return f;
    }

    CrossSections at(const Vec2& x, int region) const {
        if (sigma_t_fn_) {
            const CrossSections xs{sigma_t_fn_(x), sigma_s_fn_(x)};
            validate(xs, region);
            return xs;
        }
        auto it = table_.find(region);
        if (it == table_.end()) {
            // A single-entry table with key 0 acts as a constant field.
            it = table_.find(0);
            if (it == table_.end())
                throw std::out_of_range("cross sections: no entry for region " +
                                        std::to_string(region));
        }
        return it->second;
    }

  private:
    static void validate(const CrossSections& xs, int region) {
        if (!(xs.sigma_t >= xs.sigma_s && xs.sigma_s >= 0.0))
            throw std::invalid_argument("cross sections: need sigma_t >= sigma_s >= 0 "
                                        "(region " + std::to_string(region) + ")");
    }

    std::map<int, CrossSections> table_;
    std::function<double(const Vec2&)> sigma_t_fn_, sigma_s_fn_;
};

}  // namespace hosweep
