#pragma once

#include <map>
#include <string>
#include <vector>

namespace curvegnn::cli {

struct RunSummary {
    std::size_t epochs = 0;
    double final_metric = 0.0;  // train metric of the last epoch
    double final_val_metric = 0.0;
    double final_test_metric = 0.0;
    double final_task_loss = 0.0;
    double final_curv_loss = 0.0;
    double kappa_min = 0.0, kappa_median = 0.0, kappa_max = 0.0;
    double mean_depth = 0.0;
    std::map<int, std::size_t> depth_histogram;
};

/// Reads history.csv and depths.csv of a training run. Throws
/// ValidationError listing every missing file.
RunSummary summarize_run(const std::string& dir);

/// Writes report.json and depth_histogram.csv into a run directory, or
/// sweep.csv (one row per sub-run) into a sweep directory. Returns the
/// written paths.
std::vector<std::string> write_report(const std::string& dir);

}  // namespace curvegnn::cli
