#include "wgm/material.hpp"

#include <fstream>

#include <json.hpp>

namespace wgm {

void SellmeierModel::validate() const {
    if (!(strengths.array() > 0.0).all() || !(wavelengths_um.array() > 0.0).all())
        throw DomainError("SellmeierModel: coefficients must be strictly positive");
    if (!(valid_min_um > 0.0 && valid_max_um > valid_min_um))
        throw DomainError("SellmeierModel: empty or non-positive valid range");
}

SellmeierModel fused_silica() {
    SellmeierModel m;
    m.strengths << 0.6961663, 0.4079426, 0.8974794;
    m.wavelengths_um << 0.0684043, 0.1162414, 9.896161;
    m.valid_min_um = 0.21;
    m.valid_max_um = 3.7;
    m.source = "I. H. Malitson, J. Opt. Soc. Am. 55, 1205-1209 (1965); fused silica at 20 C";
    m.version = 1;
    return m;
}

SellmeierModel load_sellmeier(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("material file not readable: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("material file " + path + ": " + e.what());
    }
    SellmeierModel m;
    try {
        m.strengths << j.at("b1").get<double>(), j.at("b2").get<double>(), j.at("b3").get<double>();
        m.wavelengths_um << j.at("l1").get<double>(), j.at("l2").get<double>(), j.at("l3").get<double>();
        m.valid_min_um = j.at("valid_min_um").get<double>();
        m.valid_max_um = j.at("valid_max_um").get<double>();
        m.source = j.at("source").get<std::string>();
        m.version = j.value("version", 1);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("material file " + path + ": " + e.what());
    }
    m.validate();
    return m;
}

void save_sellmeier(const SellmeierModel& m, const std::string& path) {
    nlohmann::ordered_json j;
    j["format"] = "wgm-sellmeier";
    j["version"] = m.version;
    j["source"] = m.source;
    j["b1"] = m.strengths[0];
    j["b2"] = m.strengths[1];
    j["b3"] = m.strengths[2];
    j["l1"] = m.wavelengths_um[0];
    j["l2"] = m.wavelengths_um[1];
    j["l3"] = m.wavelengths_um[2];
    j["valid_min_um"] = m.valid_min_um;
    j["valid_max_um"] = m.valid_max_um;
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write material file: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace wgm
