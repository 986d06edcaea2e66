#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "splinenas/driver.hpp"

namespace splinenas {

inline constexpr int kStudyFormatVersion = 1;

nlohmann::json to_json(const Study& study);
/// Throws ParseError, VersionMismatch or InvariantViolation.
Study study_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ParamSpace& space);
ParamSpace space_from_json(const nlohmann::json& j);

/// Stable key order, two-space indent, doubles with 17 significant digits.
std::string canonical_dump(const nlohmann::json& j);

/// Writes atomically (temp file + rename). Throws IoError.
void save_study(const Study& study, const std::filesystem::path& path);
Study load_study(const std::filesystem::path& path);

/// Exclusive advisory lock on `<study>.lock`, held for the object's lifetime.
/// Throws Locked when another process holds it.
class StudyLock {
public:
    explicit StudyLock(const std::filesystem::path& study_path);
    ~StudyLock();
    StudyLock(const StudyLock&) = delete;
    StudyLock& operator=(const StudyLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace splinenas
