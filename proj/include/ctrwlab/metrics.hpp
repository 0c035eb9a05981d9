#pragma once

#include <string>

#include "ctrwlab/cadlag.hpp"

namespace ctrwlab {

struct MetricResult {
    double value = 0.0;
    std::string witness;
    bool exact = true;
    double mesh = 0.0;  // discretisation mesh for approximate metrics, 0 if exact
};

MetricResult d_uniform(const StepPath& x, const StepPath& y);

// Exact J1 distance between step paths: inf over increasing homeomorphisms
// lambda of max(|lambda - id|, |x o lambda - y|), solved as a jump-alignment
// feasibility problem over a finite candidate set of distances.
MetricResult d_j1(const StepPath& x, const StepPath& y);

// M1 distance approximated by the discrete Frechet distance (sup norm on
// (t, value)) between completed graphs, each segment cut into `resolution`
// vertices.
MetricResult d_m1(const StepPath& x, const StepPath& y, int resolution = 64);

}  // namespace ctrwlab
