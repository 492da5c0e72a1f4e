#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bodyfat/fmt.hpp"

namespace bodyfat {

struct TraceEntry {
    int epoch = 0;  // 0-based, strictly increasing
    double train_loss = 0.0;
    std::optional<double> holdout_loss;
};

struct TrainingTrace {
    std::vector<TraceEntry> entries;
};

// The Fig.-2 style data artifact. The holdout column stays empty when
// no holdout was monitored.
inline std::string trace_to_csv(const TrainingTrace& trace) {
    std::string csv = "epoch,train_loss,holdout_loss\n";
    for (const auto& e : trace.entries) {
        csv += std::to_string(e.epoch);
        csv += ',';
        csv += format_double(e.train_loss);
        csv += ',';
        if (e.holdout_loss) csv += format_double(*e.holdout_loss);
        csv += '\n';
    }
    return csv;
}

}  // namespace bodyfat
