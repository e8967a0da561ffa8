#pragma once

#include "flspde/galerkin_model.hpp"
#include "flspde/spde_solver.hpp"
#include "flspde_cli/result_table.hpp"

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace flspde::cli {

const char* version();

/// Failure with a short category printed as `error[category]: message`.
class CliError : public std::runtime_error {
public:
    CliError(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}
    const std::string& category() const { return category_; }

private:
    std::string category_;
};

struct ModelParams {
    std::string model = "heat-noncommutative"; ///< heat-noncommutative | heat-diagonal | heat-off
    int dim = 16;
    double nu = 0.02;
    double kappa = 1.0;
    double sigma = 1.0;
    std::string diffusion = "sine"; ///< sine | affine
    double rho = 2.0;
};

std::unique_ptr<GalerkinModel> make_model(const ModelParams& p);

struct ResolvedTruncation {
    TruncationParams trunc;
    bool q_auto = false;
    bool q1_auto = false;
};

/// Parses "auto" or a non-negative integer for q and q1. Auto values come
/// from minimal_q at `step`; q1 resolves to 0 for Milstein, which never reads it.
ResolvedTruncation resolve_truncation(int M, const std::string& q, const std::string& q1, double step, Scheme scheme);

/// Parses a term group list such as "J2,I3" into the mask with those groups removed.
TermMask mask_without(const std::vector<std::string>& disabled);

/// Runs one command. `args` excludes the program name. Returns the exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace flspde::cli
