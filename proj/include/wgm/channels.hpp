#pragma once

#include <string>
#include <vector>

namespace wgm {

enum class ChannelKind { DWDM, CWDM };

struct Channel {
    int index = 0;
    double center_nm = 0.0;
    double fwhm_nm = 0.0;
    bool extrapolated = false;
};

/// Fixed DWDM/CWDM filter channels.
///
/// DWDM channels are indexed by ITU channel number (21..60 on the 100 GHz grid),
/// CWDM channels ordinally from 1 (1270 nm) to 18 (1610 nm).
class ChannelTable {
public:
    [[nodiscard]] static ChannelTable load(const std::string& path);
    /// Table from `channels.json` in the default data directory.
    [[nodiscard]] static ChannelTable load_default();

    [[nodiscard]] const Channel& lookup(ChannelKind kind, int index) const;
    [[nodiscard]] const std::vector<Channel>& channels(ChannelKind kind) const;
    [[nodiscard]] const std::string& source() const { return source_; }

private:
    std::vector<Channel> dwdm_, cwdm_;
    std::string source_;
};

[[nodiscard]] ChannelKind parse_channel_kind(const std::string& s);

/// WGM_DATA_DIR if set, otherwise the data directory of the source tree.
[[nodiscard]] std::string default_data_dir();

}  // namespace wgm
