// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaslab/interpreter.hpp"

#include <set>
#include <span>
#include <string>
#include <vector>

namespace gaslab
{
struct EmptySample : std::runtime_error
{
    EmptySample() : std::runtime_error("empty sample") {}
};
struct DegenerateSample : std::runtime_error
{
    explicit DegenerateSample(const std::string& what) : std::runtime_error(what) {}
};
struct ZeroTrueValue : std::runtime_error
{
    ZeroTrueValue() : std::runtime_error("true value is zero") {}
};

/// Block-context sensitivity of a trace. D1: none of the trigger opcodes
/// appears; D2: at least one does, with the triggering set recorded.
struct OpcodeClass
{
    bool is_d2 = false;
    std::set<std::string> triggering_opcodes;

    std::string dataset_name() const { return is_d2 ? "D2" : "D1"; }
};

/// Scans a trace for BLOCKHASH, COINBASE, TIMESTAMP, NUMBER, GASLIMIT,
/// BASEFEE, PREVRANDAO, and GAS.
OpcodeClass classify_trace(std::span<const StepRecord> trace);

/// |y - y_hat| / |y| * 100, in exact rational arithmetic before rendering.
double ape(double y, double y_hat);
double ape(Gas y, Gas y_hat);

/// 1 - sum((y - y_hat)^2) / sum((y - mean)^2); may be negative.
double r_squared(std::span<const double> ys, std::span<const double> y_hats);

struct SummaryStats
{
    double median;
    double mean;
    double stddev;  ///< population standard deviation (divisor n)
};
SummaryStats summary(std::span<const double> values);

struct KsResult
{
    double d;  ///< sup |F_a - F_b| over pooled points
    double p;  ///< asymptotic two-sample p-value
};
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct KruskalWallisResult
{
    double h;  ///< tie-corrected statistic
    double p;  ///< chi-square survival, k-1 degrees of freedom
};
KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// Regularized upper incomplete gamma Q(a, x), absolute error < 1e-10.
double gamma_q(double a, double x);

/// Chi-square survival function with k degrees of freedom.
double chi_square_sf(double x, double degrees_of_freedom);

}  // namespace gaslab
