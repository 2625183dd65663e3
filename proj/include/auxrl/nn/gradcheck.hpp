#pragma once

#include <cstdint>
#include <string>

#include "auxrl/nn/layers.hpp"

namespace auxrl::nn {

struct GradcheckSpec {
    int in_dim = 3;
    int blocks = 2;
    int width = 10;
    int out_dim = 3;
    int batch = 8;
    Activation activation = Activation::swish;
    int coordinates = 100;  // parameter coordinates sampled for comparison
    double step = 1e-5;     // central-difference step
    double tolerance = 1e-4;
    std::uint64_t seed = 0;
    // Test hook: perturbs the analytic gradient so the check must fail.
    bool corrupt_gradient = false;
};

struct GradcheckReport {
    int coordinates_checked = 0;
    int failures = 0;
    double max_relative_error = 0.0;
    std::string worst_parameter;
    bool passed() const { return failures == 0; }
};

// Builds a random DenseNet + linear head in double precision, computes the MSE
// gradient by reverse mode and compares sampled coordinates against central
// finite differences evaluated through the untaped forward path.
GradcheckReport run_gradcheck(const GradcheckSpec& spec);

double relative_error(double analytic, double numeric);

}  // namespace auxrl::nn
