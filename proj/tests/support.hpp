#pragma once

// Small test-only helpers: a derivative-free optimizer and dataset builders.

#include <Eigen/Core>

#include <algorithm>
#include <functional>
#include <vector>

#include "froc/dataset.hpp"

namespace testing {

// Nelder-Mead minimization; f may return +inf outside its domain.
inline Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                                   double step, int iterations) {
    const int n = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> s(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (int i = 0; i < n; ++i) s[i + 1][i] += step;
    for (int i = 0; i <= n; ++i) fs[i] = f(s[i]);
    std::vector<int> order(n + 1);
    for (int it = 0; it < iterations; ++it) {
        for (int i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) c += s[order[i]];
        c /= n;
        const Eigen::VectorXd xr = c + (c - s[worst]);
        const double fr = f(xr);
        if (fr < fs[best]) {
            const Eigen::VectorXd xe = c + 2.0 * (c - s[worst]);
            const double fe = f(xe);
            if (fe < fr) {
                s[worst] = xe;
                fs[worst] = fe;
            } else {
                s[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            s[worst] = xr;
            fs[worst] = fr;
        } else {
            const Eigen::VectorXd xc = c + 0.5 * (s[worst] - c);
            const double fc = f(xc);
            if (fc < fs[worst]) {
                s[worst] = xc;
                fs[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i)
                    if (i != best) {
                        s[i] = s[best] + 0.5 * (s[i] - s[best]);
                        fs[i] = f(s[i]);
                    }
            }
        }
    }
    return s[static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin())];
}

}  // namespace testing
