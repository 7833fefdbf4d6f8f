#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbt/amplify.hpp"

namespace pbt {

enum class Engine { Dense, Amplified };

std::string engine_name(Engine e);

struct ProtocolRun {
    int n = 3;
    int d = 2;
    /// Density matrix on C^d; empty means half of a maximally entangled pair with a reference.
    std::optional<Eigen::MatrixXcd> input;
    Engine engine = Engine::Dense;
    ScaleVariant variant = ScaleVariant::Compressed;  // amplified engine only
    std::uint64_t seed = 0;
};

struct RunReport {
    int n = 0;
    int d = 0;
    Engine engine = Engine::Dense;
    std::vector<double> probabilities;
    /// Normalized output per outcome on B_n, or on B_n ⊗ R in entangled mode.
    std::vector<Eigen::MatrixXcd> outputs;
    Eigen::MatrixXcd channel;  // sum_i p(i) outputs[i]
    double fidelity = 0.0;     // Uhlmann fidelity of channel to the input (or to Phi in entangled mode)
    double discrepancy = 0.0;  // max_i trace distance of unnormalized branches to the dense engine
    /// {n, d, engine, probabilities, fidelity, discrepancy} as JSON text.
    std::string json() const;
};

RunReport run(const ProtocolRun& spec);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double uhlmann_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

struct Equivariance {
    double branch_residual = 0.0;  // max_i || branch(U ports) - U branch U^dagger ||
    double fidelity_rotated = 0.0;  // to U eta U^dagger, U applied on the ports first
    double fidelity_after = 0.0;    // to U eta U^dagger, U applied on the output
};

/// Compares U^{⊗(n-1)} on Bob's ports before the outcome with U on the teleported output.
Equivariance equivariance(int n, int d, const Eigen::MatrixXcd& eta, const Eigen::MatrixXcd& u);

struct Histogram {
    std::vector<long> counts;
    std::vector<double> expected;  // shots p(i)
    double chi_square = 0.0;
    double max_sigma = 0.0;  // max_i |count - shots p| / sqrt(shots p (1 - p))
};

/// Multinomial draws from the run's outcome distribution with a seeded generator.
Histogram sample(const ProtocolRun& spec, long shots);

}  // namespace pbt
