#include "gqfpe/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace gqfpe::quad {

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525452038, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
    double a, b, value, error, magnitude;
    bool operator<(const Panel& o) const { return error < o.error; }
};

double tolerance_target(const Tolerance& tol, double value) {
    return std::max(tol.abs, tol.rel * std::abs(value));
}

// Panels whose error is already at the roundoff floor are retired instead of split.
bool at_roundoff(const Panel& p) { return p.error <= 100.0 * kEps * p.magnitude; }

Result adapt(const Integrand& f, std::vector<Panel> initial, const Tolerance& tol, int evals) {
    std::priority_queue<Panel> heap;
    long double retired_value = 0.0L, retired_error = 0.0L, retired_mag = 0.0L;
    auto retire = [&](const Panel& p) {
        retired_value += p.value;
        retired_error += p.error;
        retired_mag += p.magnitude;
    };
    auto add = [&](const Panel& p) {
        if (at_roundoff(p)) {
            retire(p);
        } else {
            heap.push(p);
        }
    };
    for (const Panel& p : initial) add(p);

    auto totals = [&] {
        long double value = retired_value, error = retired_error, mag = retired_mag;
        auto copy = heap;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            mag += copy.top().magnitude;
            copy.pop();
        }
        return std::array<double, 3>{static_cast<double>(value), static_cast<double>(error),
                                     static_cast<double>(mag)};
    };
    auto finish = [&](bool limit_hit) -> Result {
        const auto t = totals();
        const bool ok = !limit_hit || t[1] <= tolerance_target(tol, t[0]);
        return {t[0], t[1], t[2], evals, ok};
    };

    const auto start = totals();
    long double run_total = start[0], run_err = start[1];
    int intervals = static_cast<int>(initial.size());
    while (!heap.empty() && run_err > tolerance_target(tol, static_cast<double>(run_total))) {
        if (intervals >= tol.max_intervals) return finish(true);
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            retire(worst);
            continue;
        }
        const Result left = gauss_kronrod21(f, worst.a, mid);
        const Result right = gauss_kronrod21(f, mid, worst.b);
        evals += 42;
        add({worst.a, mid, left.value, left.error, left.magnitude});
        add({mid, worst.b, right.value, right.error, right.magnitude});
        run_total += static_cast<long double>(left.value) + right.value - worst.value;
        run_err += static_cast<long double>(left.error) + right.error - worst.error;
        ++intervals;
    }
    return finish(false);
}

}  // namespace

Result gauss_kronrod21(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 21> fv{};
    const double fc = f(center);
    // long double accumulators lower the roundoff floor on strongly cancelling panels
    long double kronrod = static_cast<long double>(fc) * kWgk[10];
    long double gauss = 0.0L;
    double resabs = std::abs(fc) * kWgk[10];
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += kWgk[j] * (static_cast<long double>(f1) + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += kWg[j / 2] * (static_cast<long double>(f1) + f2);
    }
    const double mean = static_cast<double>(0.5L * kronrod);
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) {
        resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
    }
    const double scale = std::abs(half);
    resasc *= scale;
    resabs *= scale;
    double err = static_cast<double>(std::abs((kronrod - gauss) * half));
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
        err = std::max(50.0 * kEps * resabs, err);
    }
    return {static_cast<double>(kronrod * half), err, resabs, 21, true};
}

Result integrate(const Integrand& f, double a, double b, const Tolerance& tol) {
    const std::array<double, 2> pts{a, b};
    return integrate(f, std::span<const double>(pts), tol);
}

Result integrate(const Integrand& f, std::span<const double> breakpoints, const Tolerance& tol) {
    std::vector<Panel> panels;
    int evals = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i], b = breakpoints[i + 1];
        if (b == a) continue;
        const Result r = gauss_kronrod21(f, a, b);
        evals += r.evaluations;
        panels.push_back({a, b, r.value, r.error, r.magnitude});
    }
    if (panels.empty()) return {};
    return adapt(f, std::move(panels), tol, evals);
}

Result integrate_to_infinity(const Integrand& f, double a, const Tolerance& tol) {
    if (!(a > 0.0)) {
        Result head = integrate(f, a, 1.0, tol);
        const Result tail = integrate_to_infinity(f, 1.0, tol);
        head.value += tail.value;
        head.error += tail.error;
        head.magnitude += tail.magnitude;
        head.evaluations += tail.evaluations;
        head.converged = head.converged && tail.converged;
        return head;
    }
    // x = a / u maps [a, inf) onto (0, 1]
    const Integrand mapped = [&f, a](double u) {
        if (u <= 0.0) return 0.0;
        return f(a / u) * a / (u * u);
    };
    return integrate(mapped, 0.0, 1.0, tol);
}

Extrapolation wynn_epsilon(std::span<const double> s) {
    const std::size_t n = s.size();
    if (n == 0) return {};
    if (n < 3) return {s.back(), n == 2 ? std::abs(s[1] - s[0]) : std::abs(s[0])};

    // Best even-column estimate that uses the final element of the sequence.
    auto estimate = [](std::span<const double> seq) {
        std::vector<double> prev(seq.size() + 1, 0.0);  // column k-1 (starts as column -1)
        std::vector<double> cur(seq.begin(), seq.end());  // column k
        double best = seq.back();
        for (std::size_t k = 1; cur.size() > 1; ++k) {
            std::vector<double> next(cur.size() - 1);
            for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
                const double diff = cur[j + 1] - cur[j];
                if (diff == 0.0) return cur[j + 1];
                next[j] = prev[j + 1] + 1.0 / diff;
            }
            prev = std::move(cur);
            cur = std::move(next);
            if (k % 2 == 0 && std::isfinite(cur.back())) best = cur.back();
        }
        return best;
    };
    const double last = estimate(s);
    const double before = estimate(s.first(n - 1));
    return {last, std::abs(last - before)};
}

Result integrate_oscillatory_tail(const Integrand& f, double a, double half_period,
                                  const Tolerance& tol, int max_cycles) {
    std::vector<double> sums;
    sums.reserve(static_cast<std::size_t>(max_cycles));
    double running = 0.0, quad_err = 0.0;
    int evals = 0;
    double last_estimate = 0.0;
    int settled = 0;
    Tolerance panel_tol = tol;
    panel_tol.rel = tol.rel * 0.1;
    for (int cycle = 0; cycle < max_cycles; ++cycle) {
        const double lo = a + cycle * half_period;
        const Result r = integrate(f, lo, lo + half_period, panel_tol);
        evals += r.evaluations;
        running += r.value;
        quad_err += r.error;
        sums.push_back(running);
        if (sums.size() < 8) continue;
        // only the recent window matters for the extrapolated limit
        const std::size_t window = std::min<std::size_t>(sums.size(), 24);
        const auto ex = wynn_epsilon(std::span<const double>(sums).last(window));
        const double target = tolerance_target(tol, ex.value);
        if (std::abs(ex.value - last_estimate) <= target && ex.error <= target) {
            if (++settled >= 2) return {ex.value, ex.error + quad_err, 0.0, evals, true};
        } else {
            settled = 0;
        }
        last_estimate = ex.value;
    }
    return {last_estimate, std::abs(last_estimate - running) + quad_err, 0.0, evals, false};
}

}  // namespace gqfpe::quad
