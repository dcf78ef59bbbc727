// JSON report helpers shared by the runner and the acceptance suite.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>

#include <json.hpp>

#include "qsl/errors.hpp"

namespace qsl {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// JSON has no infinities; non-finite values are written as "inf", "-inf" or "nan".
inline json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

inline json num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

/// Serialized form used for files and byte comparisons.
inline std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

/// Writes to a sibling temporary file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::InvalidArgument, "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) fail(ErrorKind::InvalidArgument, "failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorKind::InvalidArgument, "cannot move report into place at " + path.string());
    }
}

}  // namespace qsl
