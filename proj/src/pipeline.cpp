#include "psep/pipeline.hpp"

#include <chrono>
#include <functional>
#include <map>

#include "psep/artifacts.hpp"
#include "psep/kernels.hpp"

namespace psep::pipeline {

namespace {

using Clock = std::chrono::steady_clock;
using io::CsvWriter;
using io::Json;

struct Context {
    const io::RunConfig& cfg;
    io::ArtifactSet& out;
    std::vector<verify::Check>& checks;
    Json& timing;
    std::string stage;

    template <class F>
    auto timed(const std::string& name, F&& f)
    {
        stage = name;
        const auto t0 = Clock::now();
        auto r = f();
        timing[name] = std::chrono::duration<double>(Clock::now() - t0).count();
        return r;
    }

    void add(verify::Check c)
    {
        timing["check_" + std::to_string(c.id)] = c.seconds;
        checks.push_back(std::move(c));
    }
};

Json config_json(const io::RunConfig& cfg)
{
    Json j = Json::object();
    for (const auto& [k, v] : cfg.snapshot()) j[k] = v;
    return j;
}

Json checks_json(const std::vector<verify::Check>& checks)
{
    Json a = Json::array();
    for (const auto& c : checks) a.push_back(verify::to_json(c));
    return a;
}

verify::Workspace workspace(Context& ctx)
{
    return ctx.timed("workspace", [&] { return verify::Workspace(ctx.cfg); });
}

void run_profiles(Context& ctx)
{
    const auto ws = workspace(ctx);
    const auto& p = ws.profile;
    const auto& w = ws.correction;
    const auto hats = ctx.timed("hats", [&] { return inner::solve_kernel_corrections(p, w); });

    CsvWriter prof({"z", "V1", "V2", "dV1", "dV2"});
    for (std::size_t i = 0; i < p.size(); ++i)
        prof.row({CsvWriter::cell(p.z[i]), CsvWriter::cell(p.V1[i]), CsvWriter::cell(p.V2[i]),
                  CsvWriter::cell(p.dV1[i]), CsvWriter::cell(p.dV2[i])});
    ctx.out.write_csv("profiles.csv", prof);

    CsvWriter corr({"z", "W1", "W2"});
    for (std::size_t i = 0; i < w.z.size(); ++i)
        corr.row({CsvWriter::cell(w.z[i]), CsvWriter::cell(w.W1[i]), CsvWriter::cell(w.W2[i])});
    ctx.out.write_csv("correction.csv", corr);

    CsvWriter hat({"z", "Phi1", "Phi2", "Psi1", "Psi2"});
    for (std::size_t i = 0; i < hats.z.size(); ++i)
        hat.row({CsvWriter::cell(hats.z[i]), CsvWriter::cell(hats.Phi1[i]), CsvWriter::cell(hats.Phi2[i]),
                 CsvWriter::cell(hats.Psi1[i]), CsvWriter::cell(hats.Psi2[i])});
    ctx.out.write_csv("hats.csv", hat);

    ctx.stage = "checks";
    ctx.add(verify::inner_profile_fidelity(ws));
    ctx.add(verify::translation_kernel(ws));
    ctx.add(verify::correction_profiles(ws));

    Json j;
    j["profile"] = {{"A", p.A},
                    {"B", p.B},
                    {"L", p.L},
                    {"h", p.h},
                    {"residual", p.residual},
                    {"symmetry", p.symmetry},
                    {"far_slope", p.far_slope},
                    {"fit_residual", p.fit_residual},
                    {"newton_iterations", p.newton_iterations},
                    {"secant_iterations", p.secant_iterations}};
    j["correction"] = {{"residual", w.residual},
                       {"antisymmetry", w.antisymmetry},
                       {"far_field_slope", w.drift},
                       {"far_field_intercept", w.intercept},
                       {"far_field_deviation", w.far_field_deviation},
                       {"corrected_far_field_deviation", w.corrected_deviation},
                       {"z_far", w.z_far}};
    j["hats"] = {{"a", hats.a},
                 {"b", hats.b_const},
                 {"residual", hats.residual},
                 {"phi_symmetry", hats.phi_symmetry},
                 {"psi_antisymmetry", hats.psi_antisymmetry},
                 {"phi_far_deviation", hats.phi_far_deviation},
                 {"psi_far_deviation", hats.psi_far_deviation}};
    ctx.out.write_json("asymptotics.json", j);
}

void run_limit(Context& ctx)
{
    const auto ws = workspace(ctx);
    const auto& sol = ws.limit;
    CsvWriter csv({"rho", "w"});
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        csv.row({CsvWriter::cell(sol.grid.nodes[i]), CsvWriter::cell(sol.w[i])});
    ctx.out.write_csv("limit.csv", csv);

    ctx.stage = "checks";
    verify::Check c = verify::limit_problem(ws);
    Json j = c.details;
    j["dim"] = sol.grid.dim;
    j["R"] = sol.grid.R;
    j["residual"] = sol.residual;
    j["r0_linear"] = sol.r0_linear;
    j["newton_iterations"] = sol.newton.iterations;
    ctx.out.write_json("limit.json", j);
    ctx.add(std::move(c));
}

void run_ansatz(Context& ctx)
{
    const auto ws = workspace(ctx);
    const auto bg = ws.background();
    Json levels = Json::array();
    for (std::size_t k = 0; k < ctx.cfg.eps_list.size(); ++k) {
        const double eps = ctx.cfg.eps_list[k];
        ctx.stage = "ansatz at eps " + io::format_double(eps);
        const ansatz::AnsatzField U = lin::ansatz_field(bg, eps, ctx.cfg.layer_nodes);
        CsvWriter csv({"rho", "U1", "U2", "region"});
        for (std::size_t i = 0; i < U.grid.size(); ++i)
            csv.row({CsvWriter::cell(U.grid.nodes[i]), CsvWriter::cell(U.U1[i]), CsvWriter::cell(U.U2[i]),
                     CsvWriter::cell(ansatz::region_name(U.tags[i]))});
        ctx.out.write_csv("ansatz_" + std::to_string(k) + ".csv", csv);
        const auto seam = ansatz::seam_smoothness(U);
        const auto res = ansatz::nonlinear_residual(U, ws.limit.f);
        levels.push_back({{"eps", eps},
                          {"b", U.params.b()},
                          {"b0", U.params.b0},
                          {"H0", U.params.H0},
                          {"r0", U.params.r0},
                          {"d0", U.params.d0},
                          {"d", U.params.d},
                          {"clamped", U.clamped},
                          {"min_before_clamp", U.min_before_clamp},
                          {"seam_jump", seam.max_jump},
                          {"seam_spacing", seam.spacing},
                          {"residual1", res.sup1},
                          {"residual2", res.sup2},
                          {"file", "ansatz_" + std::to_string(k) + ".csv"}});
    }
    const auto rem = ctx.timed("remainders", [&] {
        return ansatz::verify_remainders(ws.limit, ws.profile, ws.correction, ctx.cfg.eps_list, ctx.cfg.b_tilde,
                                         ctx.cfg.zeta);
    });
    Json fam = Json::array();
    for (const auto& f : rem.families) {
        Json e = Json::array(), cst = Json::array();
        for (double x : f.eps) e.push_back(x);
        for (double x : f.constant) cst.push_back(x);
        fam.push_back({{"name", f.name}, {"eps", e}, {"constant", cst}, {"grows", f.grows}});
    }
    verify::Check c;
    c.id = 0;
    c.name = "ansatz remainder bounds";
    c.pass = rem.all_bounded();
    c.summary = c.pass ? "every remainder constant stays bounded as eps decreases"
                       : "a remainder constant grows by more than 1.5x";
    c.details = {{"families", fam}};
    ctx.out.write_json("ansatz.json", {{"levels", levels}, {"remainders", fam}});
    ctx.add(std::move(c));
}

void run_estimate(Context& ctx)
{
    const auto ws = workspace(ctx);
    lin::EstimateConfig e;
    e.eps_list = ctx.cfg.eps_list;
    e.ensemble = ctx.cfg.ensemble;
    e.seed = ctx.cfg.seed;
    e.m_max = ctx.cfg.m_max;
    e.alpha = ctx.cfg.alpha;
    e.d_fraction = ctx.cfg.d_fraction;
    e.nodes = ctx.cfg.layer_nodes;
    e.threads = ctx.cfg.threads;
    const auto rep = ctx.timed("estimate", [&] { return lin::measure_estimate(ws.background(), ws.limit.f, e); });

    CsvWriter csv({"eps", "index", "mode", "kind", "ratio", "log_norm0", "log_norm1", "residual"});
    Json levels = Json::array();
    for (const auto& l : rep.levels) {
        for (const auto& s : l.samples)
            csv.row({CsvWriter::cell(l.eps), CsvWriter::cell(s.index), CsvWriter::cell(s.mode),
                     CsvWriter::cell(s.kind), CsvWriter::cell(s.ratio), CsvWriter::cell(s.log_norm0),
                     CsvWriter::cell(s.log_norm1), CsvWriter::cell(s.residual)});
        levels.push_back({{"eps", l.eps},
                          {"max_ratio", l.max_ratio},
                          {"mean_ratio", l.mean_ratio},
                          {"min_ratio", l.min_ratio},
                          {"sigma_min", l.sigma_min},
                          {"samples", l.samples.size()}});
    }
    ctx.out.write_csv("estimate.csv", csv);

    verify::Check c;
    c.id = 5;
    c.name = "estimate scaling";
    c.pass = rep.slope >= 0.85 && rep.slope <= 1.15;
    c.summary = "slope " + io::format_double(rep.slope) + " (band [0.85, 1.15])";
    c.details = {{"levels", levels},
                 {"slope", rep.slope},
                 {"slope_stderr", rep.slope_stderr},
                 {"r2", rep.fit.r2},
                 {"constant", rep.constant},
                 {"seed", rep.seed},
                 {"m_max", rep.m_max},
                 {"alpha", rep.alpha}};
    ctx.out.write_json("estimate.json", c.details);
    ctx.add(std::move(c));
}

void run_continue(Context& ctx)
{
    const auto ws = workspace(ctx);
    const auto br = ctx.timed("continuation", [&] { return verify::continuation_branch(ws); });
    for (std::size_t k = 0; k < br.points.size(); ++k) {
        const auto& p = br.points[k];
        CsvWriter csv({"rho", "u1", "u2"});
        for (std::size_t i = 0; i < p.grid.size(); ++i)
            csv.row({CsvWriter::cell(p.grid.nodes[i]), CsvWriter::cell(p.u.u1[i]), CsvWriter::cell(p.u.u2[i])});
        ctx.out.write_csv("branch_" + std::to_string(k) + ".csv", csv);
    }
    ctx.stage = "assessment";
    verify::Check c = verify::assess_branch(ws, br);
    ctx.out.write_json("branch.json", c.details);
    ctx.add(std::move(c));
}

void run_verify_all(Context& ctx)
{
    const auto ws = workspace(ctx);
    using Fn = verify::Check (*)(const verify::Workspace&);
    const std::pair<const char*, Fn> all[] = {
        {"inner profile", verify::inner_profile_fidelity}, {"kernel", verify::translation_kernel},
        {"corrections", verify::correction_profiles},      {"limit", verify::limit_problem},
        {"estimate", verify::estimate_scaling},            {"decay", verify::wrong_side_decay},
        {"collapse", verify::profile_collapse},            {"reflection", verify::reflection_laws},
        {"collar", verify::collar_schrodinger},            {"full system", verify::full_system}};
    for (const auto& [stage, fn] : all) {
        ctx.stage = stage;
        const auto t0 = Clock::now();
        verify::Check c = fn(ws);
        if (c.seconds == 0.0) c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        ctx.add(std::move(c));
    }
    CsvWriter csv({"id", "name", "status", "summary"});
    for (const auto& c : ctx.checks)
        csv.row({CsvWriter::cell(c.id), CsvWriter::cell(c.name), CsvWriter::cell(c.pass ? "PASS" : "FAIL"),
                 CsvWriter::cell(c.summary)});
    ctx.out.write_csv("verify.csv", csv);
    ctx.out.write_json("verify.json", {{"checks", checks_json(ctx.checks)}});
}

const std::map<std::string, std::function<void(Context&)>>& table()
{
    static const std::map<std::string, std::function<void(Context&)>> t = {
        {"profiles", run_profiles}, {"limit", run_limit},       {"ansatz", run_ansatz},
        {"estimate", run_estimate}, {"continue", run_continue}, {"verify-all", run_verify_all}};
    return t;
}

}  // namespace

const std::vector<std::string>& pipeline_names()
{
    static const std::vector<std::string> names = {"profiles", "limit", "ansatz", "estimate", "continue", "verify-all"};
    return names;
}

RunResult run_pipeline(const io::RunConfig& cfg, const std::string& name, const std::filesystem::path& out)
{
    const auto it = table().find(name);
    if (it == table().end()) throw UsageError("unknown pipeline '" + name + "'");

    io::ArtifactSet art(out);
    RunResult result;
    result.pipeline = name;
    result.dir = out;
    Json timing = Json::object();
    Context ctx{cfg, art, result.checks, timing, "setup"};

    Json fields;
    fields["pipeline"] = name;
    fields["version"] = version;
    fields["kernels"] = kern::isa_name(kern::active().isa);
    fields["seed"] = cfg.seed;
    fields["config"] = config_json(cfg);
    fields["inputs_sha256"] = io::sha256_hex(cfg.snapshot_text());
    try {
        art.write("config.txt", cfg.snapshot_text());
        it->second(ctx);
        ctx.stage = "manifest";
        result.pass = true;
        Json checks = Json::array();
        for (const auto& c : result.checks) {
            result.pass = result.pass && c.pass;
            checks.push_back({{"id", c.id}, {"name", c.name}, {"status", c.pass ? "PASS" : "FAIL"}});
        }
        art.write_volatile("timing.json", io::dump_json(timing));
        fields["checks"] = checks;
        fields["status"] = result.pass ? "pass" : "fail";
        art.commit(fields);
    } catch (const std::exception& e) {
        const std::string msg = "pipeline '" + name + "' failed during " + ctx.stage + ": " + e.what();
        fields["status"] = "error";
        try {
            art.abandon(fields, msg);
        } catch (...) {
        }
        throw PipelineError(msg);
    }
    return result;
}

}  // namespace psep::pipeline
