#include "curvegnn/autodiff/checkpoint.hpp"

#include <fstream>
#include "json.hpp"

#include "curvegnn/common/csv.hpp"
#include "curvegnn/common/errors.hpp"

namespace curvegnn::ad {

using nlohmann::json;

void save_checkpoint(const std::string& path, std::span<const Parameter* const> params) {
    json j;
    j["format"] = "curvegnn-checkpoint";
    j["version"] = 1;
    j["parameters"] = json::array();
    for (const Parameter* p : params) {
        j["parameters"].push_back({{"name", p->name}, {"shape", p->value.shape()}, {"data", p->value.values()}});
    }
    write_text_file(path, j.dump(1) + "\n");
}

void load_checkpoint(const std::string& path, std::span<Parameter* const> params) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    if (j.value("format", "") != "curvegnn-checkpoint") throw ValidationError(path + ": not a curvegnn checkpoint");
    std::map<std::string, const json*> by_name;
    for (const auto& entry : j.at("parameters")) by_name[entry.at("name").get<std::string>()] = &entry;
    for (Parameter* p : params) {
        auto it = by_name.find(p->name);
        if (it == by_name.end()) throw ValidationError(path + ": missing parameter '" + p->name + "'");
        auto shape = it->second->at("shape").get<std::vector<std::size_t>>();
        auto data = it->second->at("data").get<std::vector<double>>();
        Tensor t(shape, std::move(data));
        if (!t.same_shape(p->value)) {
            throw ValidationError(path + ": parameter '" + p->name + "' has shape " + t.shape_string() +
                                  ", expected " + p->value.shape_string());
        }
        p->value = std::move(t);
    }
}

}  // namespace curvegnn::ad
