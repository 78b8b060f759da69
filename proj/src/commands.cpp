#include "gqfpe/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <thread>

#include "gqfpe/coefficients.hpp"
#include "gqfpe/errors.hpp"
#include "gqfpe/kernels.hpp"
#include "gqfpe/oracle.hpp"
#include "gqfpe/propagator.hpp"
#include "gqfpe/states.hpp"
#include "gqfpe/wigner.hpp"

namespace gqfpe {

using ojson = nlohmann::ordered_json;

int thread_count() {
    const char* env = std::getenv("GQFPE_THREADS");
    if (!env || !*env) return 1;
    const int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

namespace {

ThermalParams thermal_of(const RunConfig& c, double beta) {
    ThermalParams th;
    th.beta_s = beta;
    th.matsubara_tol = c.real("matsubara_tol");
    th.validate();
    return th;
}

KR2Convention convention_of(const RunConfig& c) {
    return c.text("convention") == "printed" ? KR2Convention::Printed : KR2Convention::Derived;
}

std::string beta_tag(double beta) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", beta);
    return buf;
}

// Runs f(i) for i in [0, n) on up to thread_count() workers; the first exception wins.
template <class F>
void parallel_for(std::size_t n, F f) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(thread_count()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

ojson sample_json(const CoefficientSample& s) {
    return {{"Gamma", s.Gamma}, {"R_pq", s.R_pq}, {"R_qq", s.R_qq}, {"R_pp", s.R_pp},
            {"alpha", s.alpha}, {"D", s.D},       {"r_m", s.r_m}};
}

ojson coefficient_sweep(const RunConfig& c, OutputBundle& out, const std::string& prefix, bool branch_column) {
    const double gamma = c.real("gamma_s");
    const auto betas = c.reals("beta_s");
    const auto grid = uniform_grid(c.real("t_max"), c.integer("steps"));
    const KR2Convention conv = convention_of(c);
    std::vector<CoefficientTrack> tracks(betas.size());
    parallel_for(betas.size(), [&](std::size_t i) {
        tracks[i] = coefficient_track(grid, gamma, thermal_of(c, betas[i]), conv);
    });

    ojson runs = ojson::array();
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const auto& tr = tracks[i];
        CsvTable t;
        t.header = {"t_s", "Gamma", "R_pq", "R_qq", "R_pp", "alpha", "D", "r_m"};
        if (branch_column) t.header.push_back("branch");
        bool r_positive = true;
        for (const auto& s : tr.samples) {
            std::vector<double> row = {s.t_s, s.Gamma, s.R_pq, s.R_qq, s.R_pp, s.alpha, s.D, s.r_m};
            if (branch_column) row.push_back(s.branch);
            t.add_row(std::move(row));
            if (s.t_s > 0.0 && !(s.R_pq > 0.0 && s.R_qq > 0.0 && s.R_pp > 0.0)) r_positive = false;
        }
        const std::string file = prefix + "_beta" + beta_tag(betas[i]) + ".csv";
        out.write_csv(file, t);
        const PositivityReport rep = positivity_report(tr);
        ojson r;
        r["beta_s"] = betas[i];
        r["file"] = file;
        r["D_at_zero"] = tr.samples.front().D;
        r["sign_changes"] = rep.sign_changes;
        r["steady_sign"] = rep.steady_sign;
        r["final_sign"] = rep.final_sign;
        r["negative_throughout"] = rep.negative_throughout;
        r["R_positive_throughout"] = gamma > 0.0 && r_positive;
        r["weak_damping_ok"] = rep.weak_damping_ok;
        r["max_branch"] = rep.max_branch;
        r["min_D"] = rep.min_D;
        r["max_D"] = rep.max_D;
        r["final"] = sample_json(tr.samples.back());
        r["steady"] = sample_json(tr.steady);
        runs.push_back(r);
    }
    return {{"gamma_s", gamma}, {"convention", c.text("convention")}, {"points", grid.size()}, {"runs", runs}};
}

BasisSpec basis_of(const RunConfig& c) {
    BasisSpec b;
    b.dim = c.integer("N");
    b.omega_ref = c.real("omega_ref") > 0.0 ? c.real("omega_ref") : c.real("omega_e");
    b.validate();
    return b;
}

PotentialModel potential_of(const RunConfig& c) {
    PotentialModel p;
    p.omega_e = c.real("omega_e");
    p.shift = c.real("shift");
    p.quartic = c.real("quartic");
    p.kind = p.quartic > 0.0 ? PotentialModel::Kind::Quartic : PotentialModel::Kind::Harmonic;
    p.validate();
    return p;
}

bool has(const std::vector<std::string>& v, const char* s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

PropagationConfig propagation_of(const RunConfig& c) {
    PropagationConfig p;
    p.t_end = c.real("t_end");
    p.dt = c.real("dt");
    p.gamma_s = c.real("gamma_s");
    p.beta_s = c.real("beta_s");
    p.q0 = c.real("q0");
    p.cross_gamma_s = c.real("cross_gamma_s");
    p.convention = convention_of(c);
    p.matsubara_tol = c.real("matsubara_tol");
    p.record_every = c.integer("record_every");
    const auto monitors = c.texts("monitors");
    p.track_min_eig = has(monitors, "min_eig");
    p.track_energy = has(monitors, "energy");
    p.symmetrize = c.flag("symmetrize");
    p.trace_abort = c.real("trace_abort");
    p.validate();
    return p;
}

OracleConfig oracle_of(const RunConfig& c) {
    OracleConfig o;
    o.gamma_s = c.real("gamma_s");
    o.beta_s = c.real("beta_s");
    o.omega_e = c.real("omega_e");
    o.omega_g = c.real("omega_g");
    o.shift = c.real("shift");
    if (c.command != "propagate" && c.command != "wigner") {
        o.ground_gamma_s = c.real("ground_gamma_s");
        o.n_modes = c.integer("n_modes");
        o.omega_max = c.real("omega_max");
    }
    o.validate();
    return o;
}

ProjectedState initial_of(const RunConfig& c, const BasisSpec& basis) {
    const double leak = c.real("max_leakage");
    if (c.text("initial") == "oracle") {
        const auto rec = oracle_trajectory(oracle_of(c), {0.0}).front().moments;
        GaussianMoments m;
        m.q_mean = rec.q_mean;
        m.p_mean = rec.p_mean;
        m.q_var = rec.q2 - rec.q_mean * rec.q_mean;
        m.p_var = rec.p2 - rec.p_mean * rec.p_mean;
        m.qp_cov = rec.qp_sym - rec.q_mean * rec.p_mean;
        return gaussian_state(basis, m, leak);
    }
    return initial_state_thermal(c.real("beta_s"), c.real("omega_g"), basis, leak);
}

CsvTable moment_table() {
    CsvTable t;
    t.header = {"t_s", "trace", "q_mean", "p_mean", "q_var", "p_var", "qp_sym", "purity", "min_eig", "energy"};
    return t;
}

CsvTable trajectory_table(const Trajectory& tr, const std::vector<std::string>& monitors) {
    CsvTable t = moment_table();
    const bool trace = has(monitors, "trace");
    for (const auto& o : tr.records) {
        t.add_row({o.t_s, trace ? o.trace : NAN, o.q_mean, o.p_mean, o.q_var(), o.p_var(), o.qp_sym, o.purity,
                   o.min_eig, o.energy});
    }
    return t;
}

CsvTable oracle_table(const std::vector<OracleRecord>& recs) {
    CsvTable t = moment_table();
    for (const auto& r : recs) {
        const auto& m = r.moments;
        t.add_row({r.t_s, NAN, m.q_mean, m.p_mean, m.q2 - m.q_mean * m.q_mean, m.p2 - m.p_mean * m.p_mean,
                   m.qp_sym, r.purity, NAN, NAN});
    }
    return t;
}

// Mean of ys over the last period 2 pi / omega before the final time.
double late_average(const std::vector<double>& ts, const std::vector<double>& ys, double omega) {
    const double t_end = ts.back();
    const double from = t_end - 2.0 * M_PI / omega;
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] >= from - 1e-12) {
            sum += ys[i];
            ++n;
        }
    }
    return n ? sum / n : NAN;
}

ojson observables_json(const Observables& o) {
    return {{"t_s", o.t_s},       {"trace", o.trace},   {"q_mean", o.q_mean},         {"p_mean", o.p_mean},
            {"q_var", o.q_var()}, {"p_var", o.p_var()}, {"qp_sym", o.qp_sym},         {"purity", o.purity},
            {"min_eig", std::isnan(o.min_eig) ? ojson() : ojson(o.min_eig)},
            {"energy", std::isnan(o.energy) ? ojson() : ojson(o.energy)}};
}

struct PropagationRun {
    Trajectory trajectory;
    double leakage = 0.0;
    BasisSpec basis;
};

PropagationRun propagate_from_config(const RunConfig& c) {
    PropagationRun run;
    run.basis = basis_of(c);
    const PotentialModel pot = potential_of(c);
    const PropagationConfig p = propagation_of(c);
    const ProjectedState init = initial_of(c, run.basis);
    run.leakage = init.leakage;
    run.trajectory = propagate(init.rho, run.basis, p, pot);
    return run;
}

ojson propagation_summary(const PropagationRun& run, double omega_e) {
    const auto& tr = run.trajectory;
    std::vector<double> ts, q2;
    for (const auto& o : tr.records) {
        ts.push_back(o.t_s);
        q2.push_back(o.q2);
    }
    ojson j;
    j["steps"] = tr.steps;
    j["basis_dim"] = run.basis.dim;
    j["omega_ref"] = run.basis.omega_ref;
    j["initial_leakage"] = run.leakage;
    j["max_trace_drift"] = tr.max_trace_drift;
    j["max_hermiticity"] = tr.max_hermiticity;
    j["min_eigenvalue"] = std::isnan(tr.min_eigenvalue) ? ojson() : ojson(tr.min_eigenvalue);
    j["late_q2_mean"] = late_average(ts, q2, omega_e);
    j["final"] = observables_json(tr.records.back());
    return j;
}

std::vector<double> record_times(double t_end, double dt) {
    std::vector<double> ts;
    const int n = static_cast<int>(std::floor(t_end / dt + 1e-9));
    for (int i = 0; i <= n; ++i) ts.push_back(i * dt);
    if (t_end - ts.back() > 1e-12) ts.push_back(t_end);
    return ts;
}

}  // namespace

ojson run_kernels(const RunConfig& c, OutputBundle& out) {
    const auto grid = uniform_grid(c.real("t_max"), c.integer("steps"));
    const auto model = SpectralDensityModel::ohmic_drude(c.real("gamma_s"));
    KernelOptions opt;
    opt.method = c.text("method") == "quadrature" ? KernelMethod::Quadrature : KernelMethod::ClosedForm;
    opt.convention = convention_of(c);
    const auto th = thermal_of(c, c.real("beta_s"));
    const KernelTrack k = kernel_track(grid, model, th, opt);
    CsvTable t;
    t.header = {"t_s", "KI0", "KI1", "KI2", "KR0", "KR1", "KR2", "KI1_tilde", "KR1_tilde"};
    for (std::size_t i = 0; i < k.size(); ++i) {
        t.add_row({k.grid[i], k.KI0[i], k.KI1[i], k.KI2[i], k.KR0[i], k.KR1[i], k.KR2[i], k.KI1_tilde[i],
                   k.KR1_tilde[i]});
    }
    out.write_csv("kernels.csv", t);
    const std::size_t e = k.size() - 1;
    return {{"points", k.size()},
            {"method", c.text("method")},
            {"final", {{"t_s", k.grid[e]}, {"KI0", k.KI0[e]}, {"KI1", k.KI1[e]}, {"KI2", k.KI2[e]},
                       {"KR0", k.KR0[e]}, {"KR1", k.KR1[e]}, {"KR2", k.KR2[e]}, {"KI1_tilde", k.KI1_tilde[e]},
                       {"KR1_tilde", k.KR1_tilde[e]}}}};
}

ojson run_coeffs(const RunConfig& c, OutputBundle& out) { return coefficient_sweep(c, out, "coeffs", true); }

ojson run_figure1(const RunConfig& c, OutputBundle& out) { return coefficient_sweep(c, out, "fig1", false); }

ojson run_propagate(const RunConfig& c, OutputBundle& out) {
    const PropagationRun run = propagate_from_config(c);
    out.write_csv("trajectory.csv", trajectory_table(run.trajectory, c.texts("monitors")));
    return propagation_summary(run, c.real("omega_e"));
}

ojson run_oracle(const RunConfig& c, OutputBundle& out) {
    const OracleConfig oc = oracle_of(c);
    const auto ts = record_times(c.real("t_end"), c.real("record_dt"));
    const auto recs = oracle_trajectory(oc, ts);
    out.write_csv("oracle.csv", oracle_table(recs));
    const auto bath = discretize_bath(SpectralDensityModel::ohmic_drude(oc.gamma_s), oc.n_modes, oc.omega_max,
                                      oc.ground_gamma_s);
    std::vector<double> q2;
    for (const auto& r : recs) q2.push_back(r.moments.q2);
    const auto& f = recs.back().moments;
    return {{"n_modes", oc.n_modes},
            {"omega_max", oc.omega_max},
            {"kappa_discrete", bath.kappa()},
            {"kappa_exact", 2.0 * oc.gamma_s},
            {"late_q2_mean", late_average(ts, q2, oc.omega_e)},
            {"final", {{"t_s", recs.back().t_s}, {"q_mean", f.q_mean}, {"p_mean", f.p_mean}, {"q2", f.q2},
                       {"p2", f.p2}, {"qp_sym", f.qp_sym}, {"purity", recs.back().purity}}}};
}

ojson run_compare(const RunConfig& c, OutputBundle& out) {
    if (c.real("quartic") != 0.0) throw UnsupportedError("compare needs a harmonic V_e; the oracle is exact only for quadratic Hamiltonians");
    const OracleConfig oc = oracle_of(c);
    const PropagationRun run = propagate_from_config(c);
    std::vector<double> ts;
    for (const auto& o : run.trajectory.records) ts.push_back(o.t_s);
    const auto recs = oracle_trajectory(oc, ts);
    out.write_csv("compare_gqfpe.csv", trajectory_table(run.trajectory, c.texts("monitors")));
    out.write_csv("compare_oracle.csv", oracle_table(recs));

    double linf_q = 0.0, rms_q = 0.0, linf_q2 = 0.0, rms_q2 = 0.0;
    std::vector<double> g2, o2;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& a = run.trajectory.records[i];
        const auto& b = recs[i].moments;
        const double dq = std::abs(a.q_mean - b.q_mean);
        const double dq2 = std::abs(a.q2 - b.q2);
        linf_q = std::max(linf_q, dq);
        linf_q2 = std::max(linf_q2, dq2);
        rms_q += dq * dq;
        rms_q2 += dq2 * dq2;
        g2.push_back(a.q2);
        o2.push_back(b.q2);
    }
    const double n = static_cast<double>(ts.size());
    const double amplitude = std::abs(oc.shift - recs.front().moments.q_mean);
    const double late_g = late_average(ts, g2, oc.omega_e);
    const double late_o = late_average(ts, o2, oc.omega_e);
    ojson j;
    j["q_mean"] = {{"linf", linf_q}, {"rms", std::sqrt(rms_q / n)},
                   {"linf_relative_to_displacement", amplitude > 0.0 ? ojson(linf_q / amplitude) : ojson()}};
    j["q2"] = {{"linf", linf_q2}, {"rms", std::sqrt(rms_q2 / n)}};
    j["late_q2"] = {{"gqfpe", late_g}, {"oracle", late_o}, {"relative_error", std::abs(late_g - late_o) / std::abs(late_o)}};
    j["gqfpe"] = propagation_summary(run, c.real("omega_e"));
    return j;
}

ojson run_wigner(const RunConfig& c, OutputBundle& out) {
    const BasisSpec basis = basis_of(c);
    const std::string state = c.text("state");
    MatrixXc rho;
    double leakage = 0.0;
    if (state == "thermal") {
        auto s = initial_state_thermal(c.real("beta_s"), c.real("omega_g"), basis, c.real("max_leakage"));
        rho = s.rho;
        leakage = s.leakage;
    } else if (state == "coherent") {
        auto s = coherent_state(basis, c.real("shift"), c.real("p0"), c.real("max_leakage"));
        rho = s.rho;
        leakage = s.leakage;
    } else {
        const PropagationRun run = propagate_from_config(c);
        rho = run.trajectory.final_rho;
        leakage = run.leakage;
    }
    const int n = c.integer("points");
    const auto grid = WignerGrid::uniform(c.real("q_min"), c.real("q_max"), n, c.real("p_min"), c.real("p_max"), n);
    const WignerResult w = wigner(rho, basis, grid);
    std::string text = "q\\p";
    for (double p : grid.p) text += "," + format_cell(p);
    text += '\n';
    for (std::size_t i = 0; i < grid.q.size(); ++i) {
        text += format_cell(grid.q[i]);
        for (std::size_t k = 0; k < grid.p.size(); ++k) text += "," + format_cell(w.W(i, k));
        text += '\n';
    }
    out.write_text("wigner.csv", text);
    return {{"state", state},
            {"integral", w.integral},
            {"trace", rho.trace().real()},
            {"coverage_warning", w.coverage_warning},
            {"leakage", leakage}};
}

int execute(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
    const std::string& cmd = config.command;
    try {
        OutputBundle out(out_dir);
        ojson results;
        if (cmd == "kernels") results = run_kernels(config, out);
        else if (cmd == "coeffs") results = run_coeffs(config, out);
        else if (cmd == "figure1") results = run_figure1(config, out);
        else if (cmd == "propagate") results = run_propagate(config, out);
        else if (cmd == "oracle") results = run_oracle(config, out);
        else if (cmd == "compare") results = run_compare(config, out);
        else if (cmd == "wigner") results = run_wigner(config, out);
        else throw ConfigError("unknown command " + cmd);
        out.write_summary(cmd == "figure1" ? "fig1_summary.json" : cmd + "_summary.json", config, std::move(results));
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnsupportedError& e) {
        log << "unsupported: " << e.what() << "\n";
        write_error_json(out_dir, cmd, "unsupported", e.what());
        return kExitUnsupported;
    } catch (const EffectiveMassError& e) {
        log << "numerical failure: " << e.what() << "\n";
        ojson d = {{"t_s", std::isnan(e.t_s) ? ojson() : ojson(e.t_s)},
                   {"critical_gamma_s", std::isnan(e.critical_gamma_s) ? ojson() : ojson(e.critical_gamma_s)}};
        write_error_json(out_dir, cmd, "effective_mass", e.what(), d);
        return kExitNumerical;
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << "\n";
        const char* kind = dynamic_cast<const InstabilityError*>(&e)    ? "instability"
                           : dynamic_cast<const TruncationError*>(&e)   ? "truncation"
                           : dynamic_cast<const SingularityError*>(&e)  ? "singularity"
                                                                        : "numerical";
        write_error_json(out_dir, cmd, kind, e.what(), {{"error_estimate", e.error_estimate}});
        return kExitNumerical;
    } catch (const Error& e) {
        log << "failure: " << e.what() << "\n";
        write_error_json(out_dir, cmd, "domain", e.what());
        return kExitNumerical;
    }
}

}  // namespace gqfpe
