#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cmbo {

enum class AcquisitionKind { GpUcb, ExpectedImprovement, ProbabilityOfImprovementMax };

std::string to_string(AcquisitionKind kind);
AcquisitionKind acquisition_kind_from_string(const std::string& name);

struct AcquisitionParams {
    double ucb_beta = 3.0;
    std::vector<Eigen::Index> excluded;  // already-queried candidate indices
};

struct AcquisitionResult {
    Eigen::VectorXd scores;
    Eigen::Index best_index = 0;  // argmax over non-excluded candidates, ties lowest
};

/// Scores every candidate from the posterior mean/variance:
///   GP-UCB:  mu + sqrt(beta) * sigma
///   EI:      (mu - best) Phi(z) + sigma phi(z),  z = (mu - best) / sigma
///   PI(max): Phi((mu - best) / sigma)
/// Zero-variance candidates use the deterministic limits. Throws
/// AllCandidatesExhausted when every candidate is excluded.
AcquisitionResult acquisition(AcquisitionKind kind, const Eigen::VectorXd& mean,
                              const Eigen::VectorXd& variance, double best_y,
                              const AcquisitionParams& params = {});

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace cmbo
