#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "addt/core.hpp"

namespace testing_support {

/// log N(r; 0, Sigma) with Sigma = sigma^2 [(1-rho) I + rho J], by dense
/// Gauss-Jordan elimination with partial pivoting.
inline double dense_mvn_logpdf(const std::vector<double>& r, double sigma, double rho) {
    const std::size_t n = r.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(2 * n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = sigma * sigma * (i == j ? 1.0 : rho);
        a[i][n + i] = 1.0;
    }
    double logdet = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
        std::swap(a[c], a[piv]);
        const double d = a[c][c];
        logdet += std::log(std::abs(d));
        for (auto& v : a[c]) v /= d;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c) continue;
            const double f = a[i][c];
            for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) quad += r[i] * a[i][n + j] * r[j];
    return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

/// Reciprocal absolute temperature, written out again so the oracles do not
/// depend on the conversion under test.
inline double recip(double celsius) { return 1.0 / (celsius + 273.16); }

/// TI of log10 m = b0 + b1 x at target time td.
inline double ti_of(double b0, double b1, double td) { return b1 / (std::log10(td) - b0) - 273.16; }

/// Sigmoidal path with its closed-form line at threshold fraction p.
struct SigmoidTruth {
    double alpha = 9000, nu0 = -16, nu1 = 12500, gamma = 2;

    double mean(double t, double x) const {
        return alpha / (1.0 + std::pow(t / std::exp(nu0 + nu1 * x), gamma));
    }
    double beta0(double p) const { return nu0 / std::log(10.0) + std::log((1 - p) / p) / (gamma * std::log(10.0)); }
    double beta1() const { return nu1 / std::log(10.0); }
    double ti(double p, double td) const { return ti_of(beta0(p), beta1(), td); }
};

/// Noise-free data: `reps` copies of the mean at each (temperature, time) and
/// `baseline` copies of alpha at time 0.
template <class Path>
addt::Dataset noiseless(const Path& path, const std::vector<double>& temps, const std::vector<double>& times,
                        int reps = 5, int baseline = 10, double alpha = 9000) {
    std::vector<addt::Measurement> rows;
    for (int k = 0; k < baseline; ++k) rows.push_back({std::nullopt, 0.0, alpha});
    for (double temp : temps)
        for (double t : times)
            for (int k = 0; k < reps; ++k) rows.push_back({temp, t, path(t, recip(temp))});
    return addt::Dataset::from_measurements(rows);
}

/// Checks that every start tag is closed in order and the document has a
/// single root. Enough to catch unbalanced or truncated SVG.
inline bool well_formed_xml(const std::string& s, std::string* why = nullptr) {
    std::vector<std::string> stack;
    int roots = 0;
    std::size_t i = 0;
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg + " at " + std::to_string(i);
        return false;
    };
    while ((i = s.find('<', i)) != std::string::npos) {
        const std::size_t close = s.find('>', i);
        if (close == std::string::npos) return fail("unterminated tag");
        const std::string tag = s.substr(i + 1, close - i - 1);
        if (tag.empty()) return fail("empty tag");
        if (tag[0] == '?' || tag[0] == '!') {
        } else if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return fail("mismatched </" + tag.substr(1) + ">");
            stack.pop_back();
        } else {
            const bool self = tag.back() == '/';
            const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
            if (stack.empty()) ++roots;
            if (!self) stack.push_back(name);
            // attribute quotes must balance
            if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return fail("unbalanced quotes");
        }
        i = close + 1;
    }
    if (!stack.empty()) return fail("unclosed <" + stack.back() + ">");
    if (roots != 1) return fail("expected one root element");
    // stray ampersands must start an entity
    for (std::size_t k = s.find('&'); k != std::string::npos; k = s.find('&', k + 1)) {
        const std::size_t semi = s.find(';', k);
        if (semi == std::string::npos || semi - k > 6) return fail("bare ampersand");
    }
    return true;
}

}  // namespace testing_support
