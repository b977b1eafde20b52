#include "doctest.h"

#include <vpbgk/drift_diffusion.hpp>
#include <vpbgk/errors.hpp>
#include <vpbgk/field_solver.hpp>
#include <vpbgk/micro_macro.hpp>
#include <vpbgk/phase_mesh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace vpbgk;

namespace {

PhaseSpace small_phase_space(std::size_t nx = 16, std::size_t L = 8, int dims = 1, double length = 2 * std::numbers::pi) {
    return build_phase_space(build_space_mesh(nx, length), build_velocity_mesh(L, 8.0, dims));
}

StaggeredField field_of(std::vector<double> values, StaggeredQuantity q = StaggeredQuantity::ElectricField) {
    return StaggeredField{q, std::move(values)};
}

KineticState cosine_state(const PhaseSpace& ps, double eps) {
    KineticState s;
    s.rho.resize(ps.nx());
    for (std::size_t i = 0; i < ps.nx(); ++i) s.rho[i] = 1.0 + 0.05 * std::cos(2 * ps.space.primal_centers[i]);
    double mass = 0.0;
    for (double r : s.rho) mass += r * ps.space.dx;
    s.rho_bar = mass / ps.space.length;
    s.g.assign(ps.nx() * ps.nv(), 0.0);
    s.eps = eps;
    s.field.push(solve_poisson(s.rho, s.rho_bar, ps.space), 0.0);
    return s;
}

// Smooth data with a few random Fourier modes and a mean-free perturbation.
KineticState random_smooth_state(const PhaseSpace& ps, double eps, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-0.1, 0.1);
    KineticState s = cosine_state(ps, eps);
    const double k0 = 2 * std::numbers::pi / ps.space.length;
    std::vector<double> a(4), b(4), c(4);
    for (int m = 0; m < 4; ++m) {
        a[m] = coef(rng);
        b[m] = coef(rng);
        c[m] = coef(rng);
    }
    for (std::size_t i = 0; i < ps.nx(); ++i) {
        double r = 1.0, h = 0.0;
        for (int m = 0; m < 4; ++m) {
            r += a[m] * std::cos((m + 1) * k0 * ps.space.primal_centers[i]) + b[m] * std::sin((m + 1) * k0 * ps.space.primal_centers[i]);
            h += c[m] * std::cos((m + 1) * k0 * ps.space.dual_centers[i]);
        }
        s.rho[i] = r;
        for (std::size_t j = 0; j < ps.nv(); ++j) {
            const double v = ps.xi[j];
            s.g[i * ps.nv() + j] = eps * h * (v + 0.3 * (v * v - 1.0)) * ps.maxwellian.weights[j];
        }
    }
    double mass = 0.0;
    for (double r : s.rho) mass += r * ps.space.dx;
    s.rho_bar = mass / ps.space.length;
    s.field = FieldHistory{};
    s.field.push(solve_poisson(s.rho, s.rho_bar, ps.space), 0.0);
    return s;
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("current of simple states") {
    const auto mesh = build_space_mesh(8, 1.0);
    const std::vector<double> flat(8, 2.0);
    const auto j0 = compute_current(flat, field_of(std::vector<double>(8, 0.0)), mesh);
    CHECK(j0.quantity == StaggeredQuantity::Current);
    for (double v : j0.values) CHECK(v == 0.0);

    const std::vector<double> ones(8, 1.0);
    const auto j1 = compute_current(ones, field_of(std::vector<double>(8, 0.4)), mesh);
    for (double v : j1.values) CHECK(v == doctest::Approx(-0.4));

    const std::vector<double> two{1.0, 2.0};
    const auto j2 = compute_current(two, field_of({0.0, 0.0}), 1.0);
    CHECK(j2.values == std::vector<double>{1.0, -1.0});
}

TEST_CASE("transport of zero and of x-independent data vanishes") {
    const auto ps = small_phase_space();
    std::vector<double> g(ps.nx() * ps.nv(), 0.0);
    const auto e = field_of(std::vector<double>(ps.nx(), 0.3));
    for (double r : compute_transport(g, e, ps).rate) CHECK(r == 0.0);

    for (std::size_t i = 0; i < ps.nx(); ++i)
        for (std::size_t j = 0; j < ps.nv(); ++j) g[i * ps.nv() + j] = std::sin(0.7 * j) * ps.maxwellian.weights[j];
    const auto zero_e = field_of(std::vector<double>(ps.nx(), 0.0));
    for (double r : compute_transport(g, zero_e, ps).rate) CHECK(r == 0.0);
}

TEST_CASE("transport matches a direct upwind oracle") {
    const auto ps = build_phase_space(build_space_mesh(8, 4.0), build_velocity_mesh(2, 2.0, 1));
    const std::size_t nx = 8, nv = 4;
    std::vector<double> g(nx * nv), e(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        e[i] = (i % 3 == 0) ? 0.0 : (i % 2 ? 0.7 : -1.1);
        for (std::size_t j = 0; j < nv; ++j) g[i * nv + j] = std::cos(1.3 * i + 0.4 * j) + 0.1 * j;
    }
    const auto rate = compute_transport(g, field_of(e), ps).rate;

    const double dx = 0.5, dv = 1.0;
    const std::vector<double> v{-1.5, -0.5, 0.5, 1.5};
    const auto& M = ps.maxwellian.weights;
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t l = (i + nx - 1) % nx, r = (i + 1) % nx;
        std::vector<double> xadv(nv);
        double avg = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            const double vp = std::max(v[j], 0.0), vm = std::min(v[j], 0.0);
            xadv[j] = vp * (g[i * nv + j] - g[l * nv + j]) / dx + vm * (g[r * nv + j] - g[i * nv + j]) / dx;
            avg += xadv[j] * dv;
        }
        for (std::size_t j = 0; j < nv; ++j) {
            const double lo = j > 0 ? g[i * nv + j - 1] : 0.0;
            const double hi = j + 1 < nv ? g[i * nv + j + 1] : 0.0;
            double vadv = 0.0;
            if (e[i] > 0) vadv = e[i] * (g[i * nv + j] - lo) / dv;
            if (e[i] < 0) vadv = e[i] * (hi - g[i * nv + j]) / dv;
            CHECK(rate[i * nv + j] == doctest::Approx(xadv[j] - M[j] * avg + vadv).epsilon(1e-13));
        }
    }
}

TEST_CASE("transport of an impulse has zero velocity average away from the cut-off") {
    const auto ps = build_phase_space(build_space_mesh(8, 1.0), build_velocity_mesh(2, 2.0, 1));
    const std::size_t nv = ps.nv();
    for (std::size_t jj : {1u, 2u}) {
        std::vector<double> g(8 * nv, 0.0);
        g[3 * nv + jj] = 1.0;
        for (double ev : {0.0, 0.8, -0.6}) {
            const auto rate = compute_transport(g, field_of(std::vector<double>(8, ev)), ps).rate;
            for (std::size_t i = 0; i < 8; ++i) {
                const std::span<const double> cell(rate.data() + i * nv, nv);
                CHECK(std::abs(velocity_average(cell, ps.velocity)) <= 1e-15);
            }
        }
    }
    // At the cut-off, v-advection pushes mass out of the box.
    std::vector<double> g(8 * nv, 0.0);
    g[3 * nv] = 1.0;
    const auto rate = compute_transport(g, field_of(std::vector<double>(8, -0.5)), ps).rate;
    const std::span<const double> cell(rate.data() + 3 * nv, nv);
    CHECK(velocity_average(cell, ps.velocity) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("transport_rate_cell agrees with compute_transport in three dimensions") {
    const auto ps = small_phase_space(8, 2, 3);
    const std::size_t nv = ps.nv();
    std::vector<double> g(8 * nv);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = std::sin(0.01 * k * k);
    const auto e = field_of({0.3, -0.2, 0.0, 1.0, -1.0, 0.5, 0.25, -0.75});
    const auto rate = compute_transport(g, e, ps).rate;
    std::vector<double> one(nv);
    for (std::size_t i = 0; i < 8; ++i) {
        transport_rate_cell(std::span<const double>(g).subspan(ps.space.left(i) * nv, nv),
                            std::span<const double>(g).subspan(i * nv, nv),
                            std::span<const double>(g).subspan(ps.space.right(i) * nv, nv), e[i], ps, one);
        for (std::size_t j = 0; j < nv; ++j) CHECK(one[j] == rate[i * nv + j]);
    }
}

TEST_CASE("equilibrium is a fixed point of the micro step") {
    const auto ps = small_phase_space();
    KineticState s;
    s.rho.assign(ps.nx(), 1.0);
    s.g.assign(ps.nx() * ps.nv(), 0.0);
    s.eps = 0.1;
    s.field.push(solve_poisson(s.rho, 1.0, ps.space), 0.0);
    const auto j = compute_current(s.rho, *s.field.current(), ps.space);
    for (double v : step_micro(s, j, 0.01, ps)) CHECK(v == 0.0);
}

TEST_CASE("exponential update with unit eps and dt = ln 2") {
    const auto ps = small_phase_space(8, 4);
    const std::size_t nv = ps.nv();
    KineticState s;
    s.rho.assign(8, 1.0);
    s.eps = 1.0;
    s.g.resize(8 * nv);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < nv; ++j) s.g[i * nv + j] = 0.1 * std::cos(0.5 * j);
    s.field.push(field_of(std::vector<double>(8, 0.0)), 0.0);
    const auto current = field_of(std::vector<double>(8, 1.0), StaggeredQuantity::Current);
    const auto out = step_micro(s, current, std::log(2.0), ps);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < nv; ++j)
            CHECK(out[i * nv + j] == doctest::Approx(s.g[i * nv + j] / 2 - 0.5 * ps.xi_m[j]).epsilon(1e-14));
}

TEST_CASE("stiff limit gives the local equilibrium closure") {
    const auto ps = small_phase_space(16, 4);
    const std::size_t nv = ps.nv();
    std::mt19937_64 rng(3);
    KineticState s = random_smooth_state(ps, 1e-3, rng);
    const auto e = *s.field.current();
    const auto j = compute_current(s.rho, e, ps.space);
    const auto rate = compute_transport(s.g, e, ps).rate;
    const auto out = step_micro(s, j, 1.0, ps);
    for (std::size_t i = 0; i < ps.nx(); ++i)
        for (std::size_t k = 0; k < nv; ++k) {
            const double expected = -s.eps * (rate[i * nv + k] + ps.xi_m[k] * j[i]);
            CHECK(out[i * nv + k] == doctest::Approx(expected).epsilon(1e-14).scale(1e-18));
        }
}

TEST_CASE("small dt matches the first order relaxation factor") {
    const auto ps = small_phase_space(8, 4);
    const std::size_t nv = ps.nv();
    KineticState s;
    s.rho.assign(8, 1.0);
    s.eps = 0.5;
    s.g.resize(8 * nv);
    for (std::size_t k = 0; k < s.g.size(); ++k) s.g[k] = 0.01 * std::cos(0.3 * (k % nv)) * ps.maxwellian.weights[k % nv];
    s.field.push(field_of(std::vector<double>(8, 0.0)), 0.0);
    const auto zero_j = field_of(std::vector<double>(8, 0.0), StaggeredQuantity::Current);
    for (double ratio : {1e-3, 1e-4, 1e-6}) {
        const double dt = ratio * s.eps * s.eps;
        const auto out = step_micro(s, zero_j, dt, ps);
        for (std::size_t k = 0; k < out.size(); ++k) {
            if (s.g[k] == 0.0) continue;
            const double taylor = (1.0 - ratio) * s.g[k];
            CHECK(std::abs(out[k] - taylor) <= ratio * std::abs(taylor));
        }
    }
}

TEST_CASE("advance_micro on every cell equals step_micro, masked cells are untouched") {
    const auto ps = small_phase_space(16, 4);
    std::mt19937_64 rng(11);
    KineticState s = random_smooth_state(ps, 0.2, rng);
    const auto e = *s.field.current();
    const auto j = compute_current(s.rho, e, ps.space);
    const double dt = 1e-3;
    const auto reference = step_micro(s, j, dt, ps);
    auto g = s.g;
    advance_micro(g, e, j, s.eps, dt, ps);
    CHECK(g == reference);

    std::vector<std::uint8_t> mask(ps.nx(), 1);
    mask[4] = mask[5] = 0;
    auto masked = s.g;
    advance_micro(masked, e, j, s.eps, dt, ps, mask, InterfaceClosure::Zero);
    const std::size_t nv = ps.nv();
    for (std::size_t i = 0; i < ps.nx(); ++i)
        for (std::size_t k = 0; k < nv; ++k) {
            if (!mask[i]) CHECK(masked[i * nv + k] == s.g[i * nv + k]);
            else if (i != 3 && i != 6) CHECK(masked[i * nv + k] == reference[i * nv + k]);
        }
}

TEST_CASE("macro step keeps rho for vanishing or uniform fluxes and conserves mass") {
    const auto ps = small_phase_space(16, 4);
    const std::size_t nv = ps.nv();
    KineticState s = cosine_state(ps, 0.1);
    CHECK(step_macro(s, std::vector<double>(s.g.size(), 0.0), 0.01, ps) == s.rho);

    std::vector<double> uniform(s.g.size());
    for (std::size_t i = 0; i < ps.nx(); ++i)
        for (std::size_t k = 0; k < nv; ++k) uniform[i * nv + k] = 0.3 * ps.xi_m[k];
    const auto same = step_macro(s, uniform, 0.01, ps);
    for (std::size_t i = 0; i < ps.nx(); ++i) CHECK(same[i] == doctest::Approx(s.rho[i]).epsilon(1e-15));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> noisy(s.g.size());
    for (double& x : noisy) x = u(rng);
    const auto next = step_macro(s, noisy, 0.01, ps);
    CHECK(std::abs(sum(next) - sum(s.rho)) <= 1e-13 * sum(s.rho));
}

TEST_CASE("global equilibrium is a fixed point of the kinetic step") {
    const auto ps = small_phase_space();
    KineticState s;
    s.rho.assign(ps.nx(), 1.3);
    s.rho_bar = 1.3;
    s.g.assign(ps.nx() * ps.nv(), 0.0);
    s.eps = 0.05;
    kinetic_step(s, 1e-3, ps);
    for (double r : s.rho) CHECK(r == 1.3);
    for (double x : s.g) CHECK(x == 0.0);
    CHECK(s.time == 1e-3);
}

TEST_CASE("kinetic step at tiny eps matches the fluid step") {
    const auto ps = small_phase_space(64, 16);
    KineticState k = cosine_state(ps, 1e-8);
    FluidState f{k.rho, {}, 0.0, k.rho_bar};
    const double dt = stable_dt(k, ps, 0.5);
    kinetic_step(k, dt, ps);
    fluid_step(f, dt, ps.space, ps.maxwellian.m2);
    double gap = 0.0;
    for (std::size_t i = 0; i < ps.nx(); ++i) gap = std::max(gap, std::abs(k.rho[i] - f.rho[i]));
    CHECK(gap <= 1e-6);
}

TEST_CASE("mass is conserved over random smooth kinetic steps") {
    const auto ps = small_phase_space(32, 8);
    std::mt19937_64 rng(2024);
    for (double eps : {1.0, 0.1, 1e-3}) {
        KineticState s = random_smooth_state(ps, eps, rng);
        const double m0 = sum(s.rho);
        double previous = m0;
        for (int n = 0; n < 200; ++n) {
            kinetic_step(s, stable_dt(s, ps, 0.5), ps);
            const double m = sum(s.rho);
            CHECK(std::abs(m - previous) / m0 <= 1e-13);
            previous = m;
        }
    }
}

TEST_CASE("limit flux emerges uniformly in eps") {
    const auto ps = small_phase_space(64, 16);
    std::vector<double> ratios;
    for (double eps : {1e-2, 1e-4, 1e-6}) {
        KineticState s = cosine_state(ps, eps);
        const double dt = stable_dt(s, ps, 0.5);
        const auto e = solve_poisson(s.rho, s.rho_bar, ps.space);
        const auto j = compute_current(s.rho, e, ps.space);
        kinetic_step(s, dt, ps);
        double err = 0.0;
        for (std::size_t i = 0; i < ps.nx(); ++i) {
            const double flux = cell_flux_moment(s.g_cell(i, ps.nv()), ps) / eps;
            err = std::max(err, std::abs(flux + ps.maxwellian.m2 * j[i]));
        }
        ratios.push_back(err / (eps + dt));
    }
    for (std::size_t k = 1; k < ratios.size(); ++k) CHECK(ratios[k] <= ratios[0]);
}

TEST_CASE("perturbation keeps zero velocity mean without a field") {
    const auto ps = small_phase_space(32, 8);
    const std::size_t nv = ps.nv();
    std::vector<double> g(ps.nx() * nv);
    for (std::size_t i = 0; i < ps.nx(); ++i)
        for (std::size_t k = 0; k < nv; ++k) {
            const double v = ps.xi[k];
            g[i * nv + k] = 0.01 * std::cos(ps.space.dual_centers[i]) * (v * v - ps.maxwellian.m2) * ps.maxwellian.weights[k];
        }
    const auto e = field_of(std::vector<double>(ps.nx(), 0.0));
    std::vector<double> jv(ps.nx());
    for (std::size_t i = 0; i < ps.nx(); ++i) jv[i] = 0.05 * std::sin(ps.space.dual_centers[i]);
    const auto j = field_of(jv, StaggeredQuantity::Current);
    for (int n = 0; n < 100; ++n) advance_micro(g, e, j, 0.1, 1e-3, ps);
    double worst = 0.0;
    for (std::size_t i = 0; i < ps.nx(); ++i)
        worst = std::max(worst, std::abs(velocity_average(std::span<const double>(g).subspan(i * nv, nv), ps.velocity)));
    CHECK(worst <= 1e-12);
}

TEST_CASE("stable_dt formula") {
    const auto ps = build_phase_space(build_space_mesh(10, 1.0), build_velocity_mesh(16, 8.0, 1));
    const std::vector<double> zero(10, 0.0);
    const double dt = stable_dt(zero, 1e-3, ps, 0.5);
    CHECK(dt == doctest::Approx(0.0025).epsilon(1e-6));
    CHECK(stable_dt(zero, 1e-3, ps, 0.25) == doctest::Approx(dt / 2).epsilon(1e-15));
    CHECK(stable_dt(zero, 0.0, ps, 0.5) == dt);

    double last = dt;
    for (double emax : {1.0, 10.0, 100.0, 1000.0}) {
        std::vector<double> e(10, 0.0);
        e[4] = -emax;
        const double d = stable_dt(e, 1e-3, ps, 0.5);
        CHECK(d <= last);
        last = d;
    }
}

TEST_CASE("stable_dt bounds the micro transport at intermediate eps") {
    const auto ps = small_phase_space(64, 16);
    const double eps = 1e-2;
    const std::vector<double> zero(64, 0.0);
    const double a = 2 * eps * ps.velocity.v_star / ps.space.dx;
    REQUIRE(a > 1.0);
    CHECK(stable_dt(zero, eps, ps, 1.0) <= 2 * eps * eps * std::atanh(1.0 / a) * (1 + 1e-14));

    KineticState s = cosine_state(ps, eps);
    for (int n = 0; n < 300; ++n) kinetic_step(s, stable_dt(s, ps, 0.5), ps);
    for (double r : s.rho) CHECK(std::abs(r - 1.0) < 0.05);
}

TEST_CASE("shape mismatches are contract violations") {
    const auto ps = small_phase_space(8, 2);
    std::vector<double> g(7, 0.0);
    CHECK_THROWS_AS(compute_transport(g, field_of(std::vector<double>(8, 0.0)), ps), ContractViolation);
}
