#pragma once

// Naive reference implementations: every window is recomputed from scratch with
// explicit index loops; nothing is shared with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline double mean(const Vec& v, std::size_t from, std::size_t len) {
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += v[from + j];
    return s / static_cast<double>(len);
}

inline double var(const Vec& v, std::size_t from, std::size_t len) {
    const double mu = mean(v, from, len);
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += (v[from + j] - mu) * (v[from + j] - mu);
    return s / static_cast<double>(len);
}

inline std::size_t blocks(std::size_t tn, std::size_t n) { return tn / n; }

// block b starts at b*n; center i splits [i-n, i) | [i, i+n)
inline double b_max(const Vec& sl, const Vec& l, std::size_t n) {
    double best = 0.0;
    for (std::size_t b = 1; b < blocks(sl.size(), n); ++b) {
        const double d = mean(sl, b * n, n) - mean(sl, (b - 1) * n, n);
        best = std::max(best, std::fabs(d / mean(l, b * n, n)));
    }
    return best;
}

inline double g_max(const Vec& sl, const Vec& l, std::size_t n) {
    double best = 0.0;
    for (std::size_t b = 1; b < blocks(sl.size(), n); ++b) {
        const double d = mean(sl, b * n, n) - mean(sl, (b - 1) * n, n);
        best = std::max(best, std::fabs(d) / std::sqrt(var(l, b * n, n)));
    }
    return best;
}

inline double q_max(const Vec& sl, std::size_t n, double nu) {
    double best = 0.0;
    for (std::size_t b = 1; b < blocks(sl.size(), n); ++b)
        best = std::max(best, std::fabs(mean(sl, b * n, n) - mean(sl, (b - 1) * n, n)));
    return best / nu;
}

inline double q_max_local(const Vec& sl, std::size_t n) {
    double best = 0.0;
    for (std::size_t b = 1; b < blocks(sl.size(), n); ++b) {
        const double nu = std::sqrt(2.0 * var(sl, b * n, n));
        best = std::max(best, std::fabs(mean(sl, b * n, n) - mean(sl, (b - 1) * n, n)) / nu);
    }
    return best;
}

inline double mb_max(const Vec& sl, const Vec& l, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = n; i + n <= sl.size(); ++i) {
        const double d = mean(sl, i - n, n) - mean(sl, i, n);
        best = std::max(best, std::fabs(d / mean(l, i, n)));
    }
    return best;
}

inline double mg_max(const Vec& sl, const Vec& l, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = n; i + n <= sl.size(); ++i) {
        const double d = mean(sl, i - n, n) - mean(sl, i, n);
        best = std::max(best, std::fabs(d) / std::sqrt(var(l, i, n)));
    }
    return best;
}

inline double mq_max(const Vec& sl, std::size_t n, double nu) {
    double best = 0.0;
    for (std::size_t i = n; i + n <= sl.size(); ++i)
        best = std::max(best, std::fabs(mean(sl, i - n, n) - mean(sl, i, n)));
    return best / nu;
}

inline double mq_max_local(const Vec& sl, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = n; i + n <= sl.size(); ++i) {
        const double nu = std::sqrt(2.0 * var(sl, i, n));
        best = std::max(best, std::fabs(mean(sl, i - n, n) - mean(sl, i, n)) / nu);
    }
    return best;
}

inline Vec nu_q1(const Vec& sl, std::size_t n) {
    Vec out;
    for (std::size_t b = 0; b < blocks(sl.size(), n); ++b) out.push_back(std::sqrt(2.0 * var(sl, b * n, n)));
    return out;
}

inline Vec nu_mq1(const Vec& sl, std::size_t n) {
    Vec out;
    for (std::size_t i = n; i + n <= sl.size(); ++i) out.push_back(std::sqrt(2.0 * var(sl, i, n)));
    return out;
}

inline Vec abs_diffs(const Vec& sl, std::size_t n) {
    Vec d;
    for (std::size_t b = 1; b < blocks(sl.size(), n); ++b)
        d.push_back(std::fabs(mean(sl, b * n, n) - mean(sl, (b - 1) * n, n)));
    return d;
}

inline double nu2(const Vec& sl, std::size_t n) {
    const Vec d = abs_diffs(sl, n);
    double s = 0.0;
    for (double x : d) s += x;
    return std::sqrt(M_PI * static_cast<double>(n)) * s / (2.0 * static_cast<double>(d.size()));
}

inline double nu3(const Vec& sl, std::size_t n) {
    const Vec d = abs_diffs(sl, n);
    double s = 0.0;
    for (double x : d) s += x * x;
    return std::sqrt(static_cast<double>(n) * s / (2.0 * static_cast<double>(d.size())));
}

// consistent: divide by sqrt(2) * 0.6744897501960817; as typeset: by sqrt(2 * 0.6744...)
inline double nu4(const Vec& sl, std::size_t n, bool consistent) {
    Vec d = abs_diffs(sl, n);
    std::sort(d.begin(), d.end());
    const std::size_t k = d.size();
    const double med = (k % 2 == 1) ? d[k / 2] : (d[k / 2 - 1] + d[k / 2]) / 2.0;
    const double q75 = 0.6744897501960817;
    const double denom = consistent ? std::sqrt(2.0) * q75 : std::sqrt(2.0 * q75);
    return std::sqrt(static_cast<double>(n)) * med / denom;
}

// self-normalized ratio times the square root of the average within-block loss variance
inline double nu_L(const Vec& l, std::size_t n) {
    const std::size_t m = blocks(l.size(), n);
    double zz = 0.0;
    for (std::size_t b = 1; b < m; ++b) {
        const double zeta = std::sqrt(static_cast<double>(n)) * (mean(l, b * n, n) - mean(l, (b - 1) * n, n)) /
                            std::sqrt(var(l, b * n, n));
        zz += zeta * zeta;
    }
    double vbar = 0.0;
    for (std::size_t b = 0; b < m; ++b) vbar += var(l, b * n, n);
    vbar /= static_cast<double>(m);
    return std::sqrt(zz / (2.0 * static_cast<double>(m - 1))) * std::sqrt(vbar);
}

inline double newey_west(const Vec& x, std::size_t lag) {
    const std::size_t T = x.size();
    const double mu = mean(x, 0, T);
    double s = 0.0;
    for (std::size_t j = 0; j <= lag && j < T; ++j) {
        double g = 0.0;
        for (std::size_t t = j; t < T; ++t) g += (x[t] - mu) * (x[t - j] - mu);
        g /= static_cast<double>(T);
        const double w = 1.0 - static_cast<double>(j) / static_cast<double>(lag + 1);
        s += (j == 0 ? 1.0 : 2.0 * w) * g;
    }
    return s;
}

inline double gamma(std::size_t m) {
    const double lm = std::log(static_cast<double>(m));
    return std::sqrt(4.0 * lm - 2.0 * std::log(lm));
}

} // namespace oracle
