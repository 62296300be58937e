// Library walk-through without the pipeline: generate flows, encode the three
// flow features, split, rebalance, train two models and compare them.

#include <iostream>
#include <vector>

#include "flowguard/eda.hpp"
#include "flowguard/flowdata.hpp"
#include "flowguard/learners/model.hpp"
#include "flowguard/metrics.hpp"
#include "flowguard/pipeline/synth.hpp"
#include "flowguard/sampling.hpp"

int main() {
    using namespace flowguard;
    const std::uint64_t seed = 7;

    const RecordTable table = pipeline::generate_synthetic(2000, {0.9, 0.1}, seed);
    const FlowSchema schema = default_schema();
    const auto encoders = fit_encoders(table, schema, LabelSemantics::binary_label);
    const auto [X, y] = assemble(table, schema, encoders, LabelSemantics::binary_label);

    const auto C = pearson(X);
    std::cout << "feature correlation:\n" << correlation_csv(C) << '\n';

    const auto split = stratified_split(y, 0.2, seed);
    const auto balanced = smote(X.take(split.train), y.take(split.train), default_smote_k, seed);
    const FeatureMatrix X_test = X.take(split.test);
    const LabelVector y_test = y.take(split.test);
    std::cout << "training rows: " << balanced.original_rows() << " original + " << balanced.synthetic_from.size()
              << " synthetic\n\n";

    std::vector<EvaluationReport> reports;
    for (auto algo : {Algorithm::random_forest, Algorithm::naive_bayes}) {
        const TrainedModel model = fit_model(algo, balanced.X, balanced.y, {}, seed);
        reports.push_back(evaluate(y_test.values, predict(model, X_test), y.classes, display_name(algo)));
    }
    std::cout << render_comparison(compare(reports));
    return 0;
}
