#pragma once

#include <filesystem>

#include "curvint/io.hpp"
#include "curvint/primeform.hpp"
#include "curvint/theta.hpp"

namespace curvint {

// Orchestration shared by the CLI subcommands and the integration tests.

struct AnalyzeReport {
    json out;
    int genus = 0;
    bool generic = true;
};

inline AnalyzeReport cmd_analyze(const CurveSpec& spec) {
    AnalyzeReport rep;
    json& j = rep.out;
    j["schema"] = "curvint.analyze.v1";
    const BivarPolyQ& P = spec.poly;
    UniPolyQ dx = discriminant_y(P);
    {
        json coeffs = json::array();
        for (int i = 0; i <= dx.degree(); ++i) coeffs.push_back(dx.coeff(i).to_string());
        j["discriminant_x"] = coeffs;
    }
    auto sd = discriminant_scalar(P);
    j["discriminant"] = sd.value.to_string();
    j["generic"] = sd.generic;
    rep.generic = sd.generic;

    NewtonData nd = build_newton(P);
    auto pts_json = [](const std::vector<LatticePoint>& v) {
        json a = json::array();
        for (auto& p : v) a.push_back(json::array({p.first, p.second}));
        return a;
    };
    j["newton"] = {{"support", pts_json(nd.support)},
                   {"hull", pts_json(nd.hull)},
                   {"interior", pts_json(nd.interior)},
                   {"third_kind", pts_json(nd.third)},
                   {"second_kind", pts_json(nd.second)}};
    j["degree"] = degree(P);

    auto ps = punctures(P, nd);
    json pj = json::array();
    for (auto& p : ps) {
        json e;
        e["a"] = p.a;
        e["b"] = p.b;
        e["eta"] = cplx_to_json(p.eta);
        e["x_infinite"] = p.x_infinite;
        e["y_infinite"] = p.y_infinite;
        if (!p.x_infinite) e["X"] = cplx_to_json(p.X);
        pj.push_back(e);
    }
    j["punctures"] = pj;

    CurveContext C(P);
    json bj = json::array();
    std::vector<BranchPointInfo> nodal;
    if (sd.generic) {
        for (auto& dp : degenerate_points(P)) {
            json e;
            e["x"] = cplx_to_json(dp.x);
            e["y"] = cplx_to_json(dp.y);
            e["nodal"] = false;
            bj.push_back(e);
        }
        rep.genus = genus_generic(nd);
    } else {
        for (auto& dp : degenerate_points(P)) {
            auto info = branch_analysis(P, dp.x, dp.y);
            json e;
            e["x"] = cplx_to_json(dp.x);
            e["y"] = cplx_to_json(dp.y);
            e["nodal"] = info.nodal;
            e["local_discs"] = info.ell;
            e["genus_beta"] = info.genus_beta;
            e["deg_beta"] = info.deg_beta;
            bj.push_back(e);
            if (info.nodal) nodal.push_back(info);
        }
        // genus and moduli basis from the nodal residue functionals
        std::vector<NodalFunctional> funcs;
        for (auto& bp : nodal) {
            double radius = std::max(1e-3, 0.5 * C.clearance());
            for (auto& seg : bp.segments)
                for (auto& cpt : bp.check_points)
                    funcs.push_back({bp.x, bp.y, cpt.first, cpt.second, seg, radius});
        }
        if (funcs.empty()) {
            rep.genus = genus_generic(nd);
        } else {
            int n = (int)nd.interior.size();
            Mat R((int)funcs.size(), n);
            for (int r = 0; r < n; ++r)
                for (size_t c = 0; c < funcs.size(); ++c)
                    R((int)c, r) = detail::nodal_residue_of(
                        C, funcs[c],
                        [&](cplx x, cplx y) { return detail::omega_eval(C, nd.interior[r], x, y); },
                        1e-11);
            auto basis = nullspace(R, 1e-7);
            rep.genus = (int)basis.size();
            json mb = json::array();
            for (auto& v : basis) {
                json coeffs = json::array();
                for (auto& z : v) coeffs.push_back(cplx_to_json(z));
                mb.push_back(coeffs);
            }
            j["moduli_basis"] = mb;
        }
    }
    j["branch_points"] = bj;
    j["genus"] = rep.genus;
    return rep;
}

struct PeriodsBundle {
    CurveContext C;
    FormsContext F;
    PeriodData pd;
    CPolynomial cp;
    std::string curve_fp, cycles_fp;
    PeriodsBundle(const CurveSpec& spec, const json& cycles_json, int precision, std::uint64_t seed,
                  bool skip_transcendental = false)
        : C(spec.poly), F(C), cp_ready(false) {
        CycleSet cycles;
        if (cycles_json.is_string() && cycles_json.get<std::string>() == "auto") {
            cycles = default_cycles_hyperelliptic(C);
        } else {
            cycles = cycles_from_json(cycles_json);
            if (cycles.clearance == 0) cycles.clearance = C.clearance();
            // user-supplied loops must be closed in the plane and on the surface
            for (auto& vec : {&cycles.A, &cycles.B})
                for (auto& loop : *vec) {
                    if (loop.waypoints.size() < 3 ||
                        std::abs(loop.waypoints.front() - loop.waypoints.back()) > 1e-12)
                        throw input_error("cycle '" + loop.label + "' is not closed");
                    check_clearance(C, loop, 0.5 * cycles.clearance);
                    auto end = track(C, loop);
                    auto f0 = C.fiber(loop.waypoints.front());
                    if (std::abs(end.y - f0[loop.start_sheet]) > 1e-7 * (1 + std::abs(end.y)))
                        throw input_error("cycle '" + loop.label +
                                          "' does not close on its starting sheet");
                }
        }
        double tol = std::pow(10.0, -std::max(10, precision));
        if (skip_transcendental) {
            // the caller restores K/Khat/L/tau/S from the cache
            pd.interior = build_newton(C.poly()).interior;
            pd.cycles = cycles;
            pd.genus = (int)cycles.A.size();
            pd.abs_tol = std::min(tol, 1e-11);
        } else {
            auto sd = discriminant_scalar(spec.poly);
            if (sd.generic || sd.delta_constant) {
                pd = compute_K(C, cycles, std::min(tol, 1e-11));
            } else {
                std::vector<BranchPointInfo> nodal;
                for (auto& dp : degenerate_points(spec.poly)) {
                    auto info = branch_analysis(spec.poly, dp.x, dp.y);
                    if (info.nodal) nodal.push_back(info);
                }
                pd = compute_K_degenerate(C, cycles, nodal, std::min(tol, 1e-11));
            }
            if (pd.genus > 0) {
                compute_tau(C, pd);
                Rng rng(seed ^ 0x5bf03635u);
                compute_S(C, F, pd, rng);
            } else {
                pd.S = Mat((int)pd.interior.size(), (int)pd.interior.size());
                pd.tau = Mat(0, 0);
                pd.L = Mat((int)pd.interior.size(), 0);
            }
        }
        // reproducible origin away from the branch locus
        Rng orng(seed ^ 0x9e3779b9u);
        for (int guard = 0; guard < 200; ++guard) {
            cplx x = orng.in_rect(-1.3, 1.3, 0.2, 1.1);
            if (C.min_branch_distance(x) < 2.0 * C.clearance()) continue;
            pd.origin = C.point(x, 0);
            break;
        }
        curve_fp = fingerprint(curve_to_json(spec));
        cycles_fp = fingerprint(cycles_to_json(cycles));
    }
    const CPolynomial& cpoly() {
        if (!cp_ready) {
            cp = c_poly(C.exact());
            cp_ready = true;
        }
        return cp;
    }

  private:
    bool cp_ready;
};

inline json cmd_periods(PeriodsBundle& b, int precision, bool check) {
    json j = periods_to_json(b.pd, b.curve_fp, b.cycles_fp, precision);
    // quality diagnostics
    json diag;
    double worst_a = 0;
    for (int i = 0; i < b.pd.genus; ++i)
        for (int k = 0; k < b.pd.genus; ++k) {
            cplx v = integrate_along_path(
                b.C, b.pd.cycles.A[k],
                [&](cplx x, cplx y) {
                    cplx om = 0;
                    for (size_t r = 0; r < b.pd.interior.size(); ++r)
                        om += b.pd.Khat(i, (int)r) * detail::omega_eval(b.C, b.pd.interior[r], x, y);
                    return om;
                },
                b.pd.abs_tol);
            worst_a = std::max(worst_a, std::abs(v - (i == k ? 1.0 : 0.0)));
        }
    diag["a_period_residual"] = worst_a;
    diag["s_asymmetry"] = b.pd.s_asymmetry;
    if (check && b.pd.genus > 0) {
        // A-periods of the full kernel vanish at fresh points
        Rng rng(0xfeed);
        double worst = 0;
        for (int t = 0; t < 2; ++t) {
            cplx x2 = rng.in_rect(-0.8, 0.8, 0.3, 0.9);
            if (b.C.min_branch_distance(x2) < 1.5 * b.C.clearance()) continue;
            SurfacePoint p2 = b.C.point(x2, 0);
            for (int k = 0; k < b.pd.genus; ++k) {
                cplx v = integrate_along_path(
                    b.C, b.pd.cycles.A[k],
                    [&](cplx x, cplx y) { return bergman(b.C, b.F, b.pd, x, y, p2.x, p2.y); },
                    b.pd.abs_tol);
                worst = std::max(worst, std::abs(v));
            }
        }
        diag["bergman_a_period_residual"] = worst;
        if (worst > 1e-7) throw check_failure("periods --check: A-periods of the kernel exceed 1e-7");
    }
    if (worst_a > 1e-8) throw check_failure("periods: A-period normalization residual exceeds 1e-8");
    j["diagnostics"] = diag;
    return j;
}

inline json cmd_decompose(PeriodsBundle& b, const RationalForm& R, std::uint64_t seed, bool check,
                          bool affine) {
    Decomposer dec(b.C, b.F, b.pd, b.cpoly());
    Rng rng(seed ^ 0x51ed2701u);
    auto d = dec.decompose(R, rng);
    json j = decomposition_to_json(d, b.pd);
    if (affine && b.pd.interior.size() > 0) {
        // affine-in-S structure of the holomorphic coefficients: bump each
        // S entry by one and re-run (everything downstream is degree one)
        int n = (int)b.pd.interior.size();
        json aff = json::array();
        PeriodData bumped = b.pd;
        for (int e = 0; e < n * n; ++e) {
            int r = e / n, c = e % n;
            if (c < r) continue;  // symmetric bumps
            bumped.S = b.pd.S;
            bumped.S(r, c) += 1.0;
            if (r != c) bumped.S(c, r) += 1.0;
            Decomposer dec2(b.C, b.F, bumped, b.cpoly());
            Rng rng2(seed ^ 0x51ed2701u);
            auto d2 = dec2.decompose(R, rng2);
            json row;
            row["S_entry"] = json::array({r, c});
            json dt = json::array();
            for (int i = 0; i < b.pd.genus; ++i)
                dt.push_back(cplx_to_json(d2.t_holo[i] - d.t_holo[i]));
            row["t_holomorphic_coefficient"] = dt;
            aff.push_back(row);
        }
        j["affine_in_S"] = aff;
    }
    if (check) {
        Rng rng3(seed ^ 0xabcde1u);
        double worst = 0;
        for (int t = 0; t < 24; ++t) {
            cplx x = rng3.in_rect(-1.2, 1.2, 0.25, 1.0);
            if (b.C.min_branch_distance(x) < 1.5 * b.C.clearance()) continue;
            bool near_pole = false;
            for (auto& p : d.times.poles)
                if (!p.at_puncture && std::abs(p.point.x - x) < 0.25) near_pole = true;
            if (near_pole) continue;
            auto f = b.C.fiber(x);
            cplx y = f[t % f.size()];
            worst = std::max(worst, std::abs(dec.reconstructed_value(d, x, y) - R.value(x, y)));
        }
        j["reconstruction_residual"] = worst;
        if (worst > 1e-7) throw check_failure("decompose --check: reconstruction exceeds 1e-7");
    }
    return j;
}

inline json cmd_integrate(PeriodsBundle& b, const RationalForm& R, const GammaParsed& gamma,
                          std::uint64_t seed, bool check) {
    Decomposer dec(b.C, b.F, b.pd, b.cpoly());
    Rng rng(seed ^ 0x51ed2701u);
    auto d = dec.decompose(R, rng);
    json j;
    j["schema"] = "curvint.integral.v1";
    cplx value, direct = 0;
    bool have_direct = false;
    if (gamma.is_arc) {
        SurfacePoint p1 = b.C.point(gamma.arc_from, gamma.sheet_from);
        SurfacePoint p2 = b.C.point(gamma.arc_to, gamma.sheet_to);
        bool needs_theta = false;
        for (size_t p = 0; p < d.times.poles.size(); ++p)
            if (!d.times.poles[p].at_puncture && std::abs(d.times.t[p][0]) > 1e-12)
                needs_theta = true;
        if (needs_theta && b.pd.genus > 0) {
            ThetaContext theta(b.pd.tau);
            value = dec.integrate_incomplete(d, p1, p2, &theta);
        } else {
            value = dec.integrate_incomplete(d, p1, p2);
        }
        if (check) {
            direct = dec.direct_arc_integral(R, p1, p2);
            have_direct = true;
        }
    } else {
        value = dec.integrate_complete(d, gamma.spec);
        if (check) {
            direct = dec.direct_cycle_integral(R, d, gamma.spec);
            have_direct = true;
        }
    }
    j["value"] = cplx_to_json(value);
    if (have_direct) {
        j["direct_quadrature"] = cplx_to_json(direct);
        double rel = std::abs(value - direct) / std::max(1.0, std::abs(direct));
        j["relative_difference"] = rel;
        if (rel > 1e-6) throw check_failure("integrate --check: block value differs from quadrature");
    }
    return j;
}

// Period cache keyed by (curve, cycles, precision) fingerprints.
inline std::string cache_path(const std::string& dir, const std::string& curve_fp,
                              const std::string& cycles_fp, int precision) {
    return dir + "/periods-" + curve_fp + "-" + cycles_fp + "-p" + std::to_string(precision) +
           ".json";
}

}  // namespace curvint
