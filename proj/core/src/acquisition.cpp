#include "cmbo/acquisition.hpp"

#include <cmath>

#include "cmbo/errors.hpp"

namespace cmbo {

std::string to_string(AcquisitionKind kind) {
    switch (kind) {
        case AcquisitionKind::GpUcb:
            return "ucb";
        case AcquisitionKind::ExpectedImprovement:
            return "ei";
        case AcquisitionKind::ProbabilityOfImprovementMax:
            return "pi";
    }
    return "ucb";
}

AcquisitionKind acquisition_kind_from_string(const std::string& name) {
    if (name == "ucb" || name == "gp-ucb") return AcquisitionKind::GpUcb;
    if (name == "ei") return AcquisitionKind::ExpectedImprovement;
    if (name == "pi" || name == "pi-max") return AcquisitionKind::ProbabilityOfImprovementMax;
    throw InvalidArgument("unknown acquisition kind: " + name);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

namespace {
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
}  // namespace

AcquisitionResult acquisition(AcquisitionKind kind, const Eigen::VectorXd& mean,
                              const Eigen::VectorXd& variance, double best_y,
                              const AcquisitionParams& params) {
    if (mean.size() != variance.size()) {
        throw DimensionMismatch("acquisition: mean and variance sizes differ");
    }
    if (mean.size() == 0) {
        throw InvalidArgument("acquisition: candidate list is empty");
    }
    const Eigen::Index n = mean.size();
    AcquisitionResult result;
    result.scores.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sigma = std::sqrt(std::max(variance(i), 0.0));
        const double mu = mean(i);
        switch (kind) {
            case AcquisitionKind::GpUcb:
                result.scores(i) = mu + std::sqrt(params.ucb_beta) * sigma;
                break;
            case AcquisitionKind::ExpectedImprovement: {
                const double gap = mu - best_y;
                if (sigma == 0.0) {
                    result.scores(i) = gap > 0.0 ? gap : 0.0;
                } else {
                    const double z = gap / sigma;
                    result.scores(i) = gap * normal_cdf(z) + sigma * normal_pdf(z);
                }
                break;
            }
            case AcquisitionKind::ProbabilityOfImprovementMax: {
                const double gap = mu - best_y;
                result.scores(i) =
                    sigma == 0.0 ? (gap > 0.0 ? 1.0 : 0.0) : normal_cdf(gap / sigma);
                break;
            }
        }
    }

    std::vector<bool> excluded(static_cast<std::size_t>(n), false);
    for (Eigen::Index i : params.excluded) {
        if (i >= 0 && i < n) excluded[static_cast<std::size_t>(i)] = true;
    }
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (excluded[static_cast<std::size_t>(i)]) continue;
        if (best < 0 || result.scores(i) > result.scores(best)) best = i;
    }
    if (best < 0) {
        throw AllCandidatesExhausted("acquisition: every candidate has been queried");
    }
    result.best_index = best;
    return result;
}

}  // namespace cmbo
