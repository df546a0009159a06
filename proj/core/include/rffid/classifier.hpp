#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace rffid {

struct LabeledDataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;

    void add(std::vector<double> feature, int label);
    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }
    int class_count() const;  // max label + 1
    void validate() const;
};

/// Per-dimension z-scoring fitted on training data. Dimensions with zero
/// spread get scale 0 and are mapped to 0.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> inv_std;

    static Standardizer fit(const LabeledDataset& data);
    std::vector<double> apply(std::span<const double> x) const;
};

struct TrainConfig {
    double lambda = 1e-3;
    int epochs = 200;
    double lr = 0.1;
};

struct Prediction {
    int label = 0;
    std::vector<double> scores;
};

/// One-vs-rest linear classifier on standardized features.
struct TrainedModel {
    int classes = 0;
    std::size_t dim = 0;
    std::vector<std::vector<double>> weights;  // classes x dim
    std::vector<double> bias;
    double lambda = 0.0;
    int epochs = 0;
    Standardizer standardizer;

    /// Linear scores on an already standardized feature.
    std::vector<double> raw_scores(std::span<const double> z) const;
    Prediction predict(std::span<const double> feature) const;
};

/// Full-batch subgradient descent on the regularized hinge loss, step lr/(1+t).
TrainedModel train(const LabeledDataset& data, const TrainConfig& config = {});

double evaluate(const TrainedModel& model, const LabeledDataset& data);

/// Index of the largest value; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

/// Text format:
///   rffid-model 1
///   classes <M> dim <D> lambda <l> epochs <E>
///   mean <D values>
///   inv_std <D values>
///   class <c> bias <b> w <D values>      (M lines)
void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);

} // namespace rffid
