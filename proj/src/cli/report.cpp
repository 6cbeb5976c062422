#include "curvegnn/cli/report.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "curvegnn/common/csv.hpp"
#include "curvegnn/common/errors.hpp"
#include "json.hpp"

namespace curvegnn::cli {

namespace fs = std::filesystem;

namespace {

double cell(const CsvTable& t, std::size_t row, const std::string& col) {
    return parse_double(t.rows[row][t.column(col)], t.source, t.line_numbers[row]);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::ordered_json to_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["epochs"] = s.epochs;
    j["final_metric"] = s.final_metric;
    j["final_val_metric"] = s.final_val_metric;
    j["final_test_metric"] = s.final_test_metric;
    j["final_task_loss"] = s.final_task_loss;
    j["final_curv_loss"] = s.final_curv_loss;
    j["kappa_hat"] = {{"min", s.kappa_min}, {"median", s.kappa_median}, {"max", s.kappa_max}};
    j["mean_depth"] = s.mean_depth;
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (auto [t, c] : s.depth_histogram) hist[std::to_string(t)] = c;
    j["depth_histogram"] = hist;
    return j;
}

}  // namespace

RunSummary summarize_run(const std::string& dir) {
    std::vector<std::string> missing;
    if (!fs::is_directory(dir)) throw ValidationError("report: run directory '" + dir + "' does not exist");
    for (const char* f : {"history.csv", "depths.csv"}) {
        if (!fs::exists(fs::path(dir) / f)) missing.push_back(f);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw ValidationError("report: missing inputs in '" + dir + "': " + list);
    }
    CsvTable hist = read_csv((fs::path(dir) / "history.csv").string());
    CsvTable depths = read_csv((fs::path(dir) / "depths.csv").string());
    if (hist.rows.empty()) throw ValidationError("report: history.csv has no epochs");
    if (depths.rows.empty()) throw ValidationError("report: depths.csv has no vertices");

    RunSummary s;
    std::size_t last = hist.rows.size() - 1;
    s.epochs = hist.rows.size();
    s.final_metric = cell(hist, last, "metric");
    s.final_val_metric = hist.has_column("val_metric") ? cell(hist, last, "val_metric") : 0.0;
    s.final_test_metric = hist.has_column("test_metric") ? cell(hist, last, "test_metric") : 0.0;
    s.final_task_loss = cell(hist, last, "L_task");
    s.final_curv_loss = cell(hist, last, "L_curv");

    std::vector<double> kappa;
    double depth_sum = 0.0;
    for (std::size_t r = 0; r < depths.rows.size(); ++r) {
        kappa.push_back(cell(depths, r, "kappa_hat"));
        auto t = static_cast<int>(parse_int(depths.rows[r][depths.column("T")], depths.source, depths.line_numbers[r]));
        ++s.depth_histogram[t];
        depth_sum += t;
    }
    s.kappa_min = *std::min_element(kappa.begin(), kappa.end());
    s.kappa_max = *std::max_element(kappa.begin(), kappa.end());
    s.kappa_median = median(kappa);
    s.mean_depth = depth_sum / static_cast<double>(depths.rows.size());
    return s;
}

std::vector<std::string> write_report(const std::string& dir) {
    const fs::path root(dir);
    const fs::path sweep_file = root / "sweep.json";
    if (fs::exists(sweep_file)) {
        auto sweep = nlohmann::json::parse(read_text_file(sweep_file.string()));
        const std::string param = sweep.at("parameter").get<std::string>();
        std::ostringstream csv;
        csv << param << ",run,metric,val_metric,test_metric,mean_depth,kappa_median\n";
        nlohmann::ordered_json runs = nlohmann::ordered_json::array();
        for (const auto& run : sweep.at("runs")) {
            const std::string sub = run.at("dir").get<std::string>();
            RunSummary s = summarize_run((root / sub).string());
            csv << run.at("value").get<std::string>() << ',' << sub << ',' << format_double(s.final_metric) << ','
                << format_double(s.final_val_metric) << ',' << format_double(s.final_test_metric) << ','
                << format_double(s.mean_depth) << ',' << format_double(s.kappa_median) << '\n';
            auto j = to_json(s);
            j["value"] = run.at("value");
            runs.push_back(j);
        }
        write_text_file((root / "sweep.csv").string(), csv.str());
        nlohmann::ordered_json rep;
        rep["parameter"] = param;
        rep["runs"] = runs;
        write_text_file((root / "report.json").string(), rep.dump(2) + "\n");
        return {(root / "sweep.csv").string(), (root / "report.json").string()};
    }

    RunSummary s = summarize_run(dir);
    std::ostringstream csv;
    csv << "T,count\n";
    for (auto [t, c] : s.depth_histogram) csv << t << ',' << c << '\n';
    write_text_file((root / "depth_histogram.csv").string(), csv.str());
    write_text_file((root / "report.json").string(), to_json(s).dump(2) + "\n");
    return {(root / "depth_histogram.csv").string(), (root / "report.json").string()};
}

}  // namespace curvegnn::cli
