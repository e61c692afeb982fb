#include "mmenc/error.hpp"
#include "mmenc/synthesis.hpp"

namespace mmenc {

std::vector<std::string> preset_names() {
    return {"sc1", "sc2", "sc3", "cm1", "cm4", "cm9"};
}

AnyModel preset(std::string_view name) {
    // metal cabinet scenarios
    if (name == "sc1")
        return ChannelModel{54.711, 0.02, 0.39, 175.23, 4.90, 0.985, 0.083, 1.180, 0.015, 113.4,
                            kDefaultThresholdDb, "sc1"};
    if (name == "sc2")
        return ChannelModel{53.439, 0.004, 0.17, 197.99, 5.48, 1.037, 0.059, 1.219, 0.008, 159.1,
                            kDefaultThresholdDb, "sc2"};
    if (name == "sc3")
        return ChannelModel{54.116, 0.002, 0.16, 197.93, 4.86, 1.094, 0.084, 1.235, 0.009, 158.3,
                            kDefaultThresholdDb, "sc3"};
    // IEEE 802.15.3c channel models
    if (name == "cm1") return SvModel{0.144, 1.17, 21.5, 4.35, 3.71, 7.31, "cm1"};
    if (name == "cm4") return SvModel{0.07, 1.88, 19.44, 0.42, 1.82, 1.88, "cm4"};
    if (name == "cm9") return SvModel{0.044, 1.01, 64.2, 61.1, 2.66, 4.39, "cm9"};
    throw Error("unknown preset '" + std::string(name) + "'");
}

} // namespace mmenc
