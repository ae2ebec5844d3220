#pragma once

#include "levychain/families.hpp"
#include "levychain/levy_model.hpp"

#include <cmath>
#include <numbers>

namespace testing_models {

using namespace levychain;

inline LevyModel brownian(double sigma2, double mu, int V = 0) {
    LevyModel m;
    m.name = "bm";
    m.sigma2 = {sigma2};
    m.mu = {mu};
    m.measure = LevyMeasure::zero(1);
    m.cutoff_V = V;
    return m;
}

inline LevyModel two_atoms(double sigma2 = 1.0, double at = 0.5) {
    LevyModel m = brownian(sigma2, 0.0);
    m.measure = LevyMeasure::atomic(1, {{{at}, 0.5}, {{-at}, 0.5}});
    return m;
}

inline double normal_pdf(double x, double mean, double var) {
    return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace testing_models
