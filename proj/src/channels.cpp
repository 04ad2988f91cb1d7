#include "wgm/channels.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "wgm/errors.hpp"

#ifndef WGM_DEFAULT_DATA_DIR
#define WGM_DEFAULT_DATA_DIR "data"
#endif

namespace wgm {

namespace {

std::vector<Channel> parse_list(const nlohmann::json& arr, const std::string& what) {
    std::vector<Channel> out;
    for (const auto& e : arr) {
        Channel c;
        c.index = e.at("channel").get<int>();
        c.center_nm = e.at("center_nm").get<double>();
        c.fwhm_nm = e.at("fwhm_nm").get<double>();
        c.extrapolated = e.value("extrapolated", false);
        if (!(c.center_nm > 0.0 && c.fwhm_nm > 0.0)) throw FormatError(what + ": non-positive channel values");
        if (!out.empty() && c.index != out.back().index + 1)
            throw FormatError(what + ": channel indices must be contiguous and increasing");
        out.push_back(c);
    }
    if (out.empty()) throw FormatError(what + ": no channels");
    return out;
}

}  // namespace

ChannelTable ChannelTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("channel file not readable: " + path);
    ChannelTable t;
    try {
        nlohmann::json j;
        in >> j;
        t.dwdm_ = parse_list(j.at("dwdm"), "dwdm");
        t.cwdm_ = parse_list(j.at("cwdm"), "cwdm");
        t.source_ = j.value("source", "");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("channel file " + path + ": " + e.what());
    }
    for (const auto* list : {&t.dwdm_, &t.cwdm_})
        for (std::size_t i = 1; i < list->size(); ++i)
            if ((*list)[i].center_nm == (*list)[i - 1].center_nm)
                throw FormatError("channel file " + path + ": centres must be strictly monotone");
    return t;
}

ChannelTable ChannelTable::load_default() { return load(default_data_dir() + "/channels.json"); }

const std::vector<Channel>& ChannelTable::channels(ChannelKind kind) const {
    return kind == ChannelKind::DWDM ? dwdm_ : cwdm_;
}

const Channel& ChannelTable::lookup(ChannelKind kind, int index) const {
    const auto& list = channels(kind);
    const int i = index - list.front().index;
    if (i < 0 || i >= static_cast<int>(list.size()))
        throw DomainError(std::string(kind == ChannelKind::DWDM ? "DWDM" : "CWDM") + " channel " +
                          std::to_string(index) + " is not in the table");
    return list[static_cast<std::size_t>(i)];
}

ChannelKind parse_channel_kind(const std::string& s) {
    if (s == "DWDM" || s == "dwdm") return ChannelKind::DWDM;
    if (s == "CWDM" || s == "cwdm") return ChannelKind::CWDM;
    throw FormatError("unknown channel kind '" + s + "'");
}

std::string default_data_dir() {
    if (const char* env = std::getenv("WGM_DATA_DIR"); env && *env) return env;
    return WGM_DEFAULT_DATA_DIR;
}

}  // namespace wgm
