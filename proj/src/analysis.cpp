// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/analysis.hpp"

#include "gaslab/opcodes.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gaslab
{
OpcodeClass classify_trace(std::span<const StepRecord> trace)
{
    static const std::set<std::uint8_t> triggers = {
        OP_BLOCKHASH,
        OP_COINBASE,
        OP_TIMESTAMP,
        OP_NUMBER,
        OP_GASLIMIT,
        OP_BASEFEE,
        OP_PREVRANDAO,
        OP_GAS,
    };

    OpcodeClass result;
    for (const StepRecord& step : trace)
        if (triggers.contains(step.opcode))
        {
            result.is_d2 = true;
            result.triggering_opcodes.insert(step.mnemonic());
        }
    return result;
}

double ape(double y, double y_hat)
{
    if (y == 0.0)
        throw ZeroTrueValue{};
    return std::abs((y - y_hat) / y) * 100.0;
}

double ape(Gas y, Gas y_hat)
{
    if (y == 0)
        throw ZeroTrueValue{};
    // exact rational |y - y_hat| / y * 100, rendered to double at the end
    using boost::multiprecision::cpp_int;
    const cpp_int diff = y >= y_hat ? cpp_int{y - y_hat} : cpp_int{y_hat - y};
    const cpp_int scaled = diff * 100;
    const cpp_int quotient = scaled / y;
    const cpp_int remainder = scaled % y;
    return static_cast<double>(quotient) +
           static_cast<double>(remainder) / static_cast<double>(y);
}

double r_squared(std::span<const double> ys, std::span<const double> y_hats)
{
    if (ys.size() != y_hats.size() || ys.size() < 2)
        throw DegenerateSample{"r_squared requires two equal-length samples"};
    const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) /
                        static_cast<double>(ys.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i)
    {
        ss_res += (ys[i] - y_hats[i]) * (ys[i] - y_hats[i]);
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    if (ss_tot == 0.0)
        throw DegenerateSample{"all true values identical"};
    return 1.0 - ss_res / ss_tot;
}

SummaryStats summary(std::span<const double> values)
{
    if (values.empty())
        throw EmptySample{};
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    const double median = n % 2 == 1
                              ? sorted[n / 2]
                              : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    const double mean =
        std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    double variance = 0.0;
    for (const double v : sorted)
        variance += (v - mean) * (v - mean);
    variance /= static_cast<double>(n);
    return {median, mean, std::sqrt(variance)};
}

namespace
{
/// Empirical CDF value F(x) = |{v in sample : v <= x}| / n for a sorted sample.
double ecdf_at(const std::vector<double>& sorted, double x)
{
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) /
           static_cast<double>(sorted.size());
}

/// Two-sided asymptotic Kolmogorov p-value: 2 * sum (-1)^(k-1) exp(-2 k^2 l^2).
double kolmogorov_p(double lambda)
{
    if (lambda <= 0.0)
        return 1.0;  // identical ECDFs
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1;; ++k)
    {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        // absolute cutoff: even tiny leading terms must contribute, or small
        // p-values would collapse to zero
        if (term < 1e-16)
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}
}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw EmptySample{};
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    // evaluate both CDFs at every pooled point; ties are handled naturally
    double d = 0.0;
    for (const auto* sample : {&sa, &sb})
        for (const double x : *sample)
            d = std::max(d, std::abs(ecdf_at(sa, x) - ecdf_at(sb, x)));

    const double n_eff = static_cast<double>(sa.size()) * static_cast<double>(sb.size()) /
                         static_cast<double>(sa.size() + sb.size());
    const double sqrt_n = std::sqrt(n_eff);
    const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    return {d, kolmogorov_p(lambda)};
}

namespace
{
constexpr double gamma_eps = 1e-14;
constexpr int gamma_max_iter = 10000;

/// Lower regularized gamma P(a, x) by series expansion; valid for x < a + 1.
double gamma_p_series(double a, double x)
{
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 0; n < gamma_max_iter; ++n)
    {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * gamma_eps)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Upper regularized gamma Q(a, x) by continued fraction; valid for x >= a + 1.
double gamma_q_continued_fraction(double a, double x)
{
    constexpr double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < gamma_max_iter; ++i)
    {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin)
            d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin)
            c = fpmin;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < gamma_eps)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}
}  // namespace

double gamma_q(double a, double x)
{
    if (x < 0.0 || a <= 0.0)
        throw std::domain_error{"gamma_q domain"};
    if (x == 0.0)
        return 1.0;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi_square_sf(double x, double degrees_of_freedom)
{
    return gamma_q(degrees_of_freedom / 2.0, x / 2.0);
}

KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups)
{
    if (groups.size() < 2)
        throw DegenerateSample{"kruskal_wallis requires >= 2 groups"};
    std::size_t total = 0;
    for (const auto& g : groups)
    {
        if (g.empty())
            throw EmptySample{};
        total += g.size();
    }
    if (total < 3)
        throw DegenerateSample{"kruskal_wallis requires pooled n >= 3"};

    // pool, remembering group membership
    std::vector<std::pair<double, std::size_t>> pooled;
    pooled.reserve(total);
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        for (const double v : groups[gi])
            pooled.emplace_back(v, gi);
    std::sort(pooled.begin(), pooled.end(),
        [](const auto& a, const auto& b) { return a.first < b.first; });

    // mid-ranks with ties averaged; accumulate tie correction
    const double n = static_cast<double>(total);
    std::vector<double> rank_sum(groups.size(), 0.0);
    double tie_correction = 0.0;
    std::size_t i = 0;
    while (i < pooled.size())
    {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].first == pooled[i].first)
            ++j;
        const double t = static_cast<double>(j - i);
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            rank_sum[pooled[k].second] += avg_rank;
        tie_correction += t * t * t - t;
        i = j;
    }

    const double tie_factor = 1.0 - tie_correction / (n * n * n - n);
    if (tie_factor == 0.0)
        return {0.0, 1.0};  // every pooled value tied

    double h = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        h += rank_sum[gi] * rank_sum[gi] / static_cast<double>(groups[gi].size());
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    h /= tie_factor;

    const double df = static_cast<double>(groups.size()) - 1.0;
    return {h, chi_square_sf(h, df)};
}

}  // namespace gaslab
