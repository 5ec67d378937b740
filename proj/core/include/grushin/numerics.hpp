#pragma once

#include <grushin/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <thread>
#include <type_traits>
#include <vector>

namespace grushin {

inline constexpr double kPi = std::numbers::pi;

struct QuadratureSpec {
    double truncation = 40.0;   // half-infinite integrals stop at a + truncation
    int max_refinements = 4000;  // panel splits
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;

    void validate() const;
};

struct RootSpec {
    double lo = 0.0;
    double hi = 1.0;
    double tol = 1e-12;       // relative to max(|lo|, |hi|)
    double abs_tol = 1e-300;
    int max_iter = 400;
};

struct EstimateWithError {
    double value = 0.0;
    double error = 0.0;        // standard error (Monte Carlo) or error bound (quadrature)
    std::int64_t samples = 0;  // draws or integrand evaluations
    std::uint64_t seed = 0;    // Monte Carlo only
    bool converged = true;
};

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    std::int64_t evals = 0;
    bool converged = true;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
auto gk15(F& f, double a, double b) {
    using T = std::decay_t<decltype(f(a))>;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fc = f(c);
    T kron = fc * kWgk[7];
    T gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        T f1 = f(c - dx);
        T f2 = f(c + dx);
        kron += (f1 + f2) * kWgk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
    }
    kron *= h;
    gauss *= h;
    return Panel<T>{a, b, kron, std::abs(kron - gauss)};
}

}  // namespace detail

// Adaptive Gauss-Kronrod 15/7 over [a, b]; the worst panel is split until the
// summed error estimate meets max(abs_tol, rel_tol*|I|). Works for real and
// complex integrands.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
    using T = std::decay_t<decltype(f(a))>;
    QuadResult<T> out;
    if (a == b) return out;
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw DomainError("integrate: endpoints must be finite");
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::vector<detail::Panel<T>> heap;
    heap.reserve(static_cast<std::size_t>(spec.max_refinements) + 2);
    heap.push_back(detail::gk15(f, a, b));
    out.evals = 15;
    T total = heap.front().value;
    double err = heap.front().error;

    auto satisfied = [&] { return err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

    int splits = 0;
    bool stuck = false;
    while (!satisfied() && splits < spec.max_refinements) {
        std::pop_heap(heap.begin(), heap.end());
        auto worst = heap.back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) {
            stuck = true;
            break;
        }
        heap.pop_back();
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        out.evals += 30;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        ++splits;

        // Re-sum every so often so the running totals do not drift.
        if (splits % 64 == 0) {
            total = T{};
            err = 0.0;
            for (const auto& p : heap) {
                total += p.value;
                err += p.error;
            }
        } else {
            total += left.value + right.value - worst.value;
            err += left.error + right.error - worst.error;
        }
    }
    total = T{};
    err = 0.0;
    for (const auto& p : heap) {
        total += p.value;
        err += p.error;
    }
    out.value = total * sign;
    out.error = err;
    out.converged = !stuck && satisfied();
    return out;
}

// [a, a + spec.truncation]; callers pick the truncation from the integrand's envelope.
template <class F>
auto integrate_tail(F&& f, double a, const QuadratureSpec& spec) {
    return integrate(std::forward<F>(f), a, a + spec.truncation, spec);
}

EstimateWithError integrate_1d(const std::function<double(double)>& f, double a, double b,
                               const QuadratureSpec& spec);

double find_root_monotone(const std::function<double(double)>& f, const RootSpec& spec);

// Special functions.
double log_gamma(double z);
double log_beta(double p, double q);
double beta(double p, double q);
double log_sphere_area(int n);  // log |S^{n-1}|, the unit sphere in R^n
double sphere_area(int n);

// x - sin x, sin x - x cos x, 1 - cos x without cancellation near 0.
double x_minus_sin(double x);
double sin_minus_x_cos(double x);
double one_minus_cos(double x);
double sinc(double x);  // sin x / x

// Seeded generator; each (seed, stream) pair is an independent, reproducible sequence.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() { return engine_(); }
    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

int default_jobs();

// Static contiguous partition of [0, count); fn(i) for each i. Results that
// fn writes to slot i are independent of `jobs`.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    if (jobs <= 0) jobs = default_jobs();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(count, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace grushin
