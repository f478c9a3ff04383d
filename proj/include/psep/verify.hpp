#pragma once

#include <string>
#include <vector>

#include "psep/artifacts.hpp"
#include "psep/config.hpp"
#include "psep/estimate.hpp"
#include "psep/fullsys.hpp"
#include "psep/inner.hpp"
#include "psep/limit.hpp"

// The acceptance checks, each returning a pass flag, a one-line summary and
// deterministic details for the artifacts.
namespace psep::verify {

struct Check {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string summary;
    io::Json details = io::Json::object();
    std::vector<std::string> notes;   // informational, not part of the verdict
    double seconds = 0.0;             // wall time (kept out of the JSON)
};

io::Json to_json(const Check& c);

// Objects shared by several checks, built once from the configuration.
struct Workspace {
    io::RunConfig cfg;
    inner::ProfilePair profile;
    inner::CorrectionProfile correction;
    limit::ScalarLimitSolution limit;

    explicit Workspace(const io::RunConfig& c);
    lin::LayerBackground background() const;
};

// Radial ODE shooting for the limit problem (RK4, `steps` uniform steps): the initial
// slope (dim 1) or value (dim >= 2) is corrected by secant iteration from `guess` until
// w(R) = 0. Independent of the finite-difference route.
struct ShootingResult {
    double parameter = 0.0;
    double r0 = 0.0;
    double mu = 0.0;
    double end_value = 0.0;
    int sign_changes = 0;
};
ShootingResult shoot_limit(const limit::Nonlinearity& f, int dim, double R, double guess, int steps = 20000);

Check inner_profile_fidelity(const Workspace& ws);
Check translation_kernel(const Workspace& ws);
Check correction_profiles(const Workspace& ws);
Check limit_problem(const Workspace& ws);
Check estimate_scaling(const Workspace& ws);
Check wrong_side_decay(const Workspace& ws);
Check profile_collapse(const Workspace& ws);
Check reflection_laws(const Workspace& ws);
Check collar_schrodinger(const Workspace& ws);
Check full_system(const Workspace& ws);

// Continuation over cfg.betas seeded by the ansatz at eps = betas[0]^(-1/4), and the
// check-10 verdict on a computed branch.
full::SolutionBranch continuation_branch(const Workspace& ws);
Check assess_branch(const Workspace& ws, const full::SolutionBranch& br);

// Checks 1 to 10 in order.
std::vector<Check> run_all(const Workspace& ws);

// Right-hand sides shared by the diagnostics: a C^3 bump for component 1 in the far
// field of Omega_1 and, for `generic`, a second bump for component 2 inside Omega_2.
Field2 far_field_data(const num::Grid& g, double r0, double R, bool generic);

}  // namespace psep::verify
