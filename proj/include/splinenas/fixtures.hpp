#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splinenas/driver.hpp"
#include "splinenas/paramspace.hpp"

namespace splinenas {

enum class FixtureRowKind { Initial, Incremental, Reference };

std::string_view to_string(FixtureRowKind kind) noexcept;

struct FixtureRow {
    FixtureRowKind kind = FixtureRowKind::Initial;
    Point coords;
    std::optional<double> measured;
    std::optional<double> predicted;
    /// The row deliberately lies outside the declared box.
    bool extrapolated = false;
};

/// A published measurement table, shipped read-only with the library.
struct FixtureTable {
    std::string name;
    ParamSpace space;
    std::vector<FixtureRow> rows;

    std::vector<const FixtureRow*> rows_of(FixtureRowKind kind) const;
};

std::vector<std::string> fixture_names();

/// Raw CSV text of an embedded fixture. Throws UnknownFixture.
std::string_view fixture_text(std::string_view name);

FixtureTable parse_fixture(std::string_view name, std::string_view csv);

/// Throws UnknownFixture.
FixtureTable load_fixture(std::string_view name);

struct ReplayOptions {
    /// Also import the measured incremental rows.
    bool include_incremental = false;
    /// Also import measured reference rows (the default-configuration check).
    bool include_reference = false;
    bool normalize = true;
};

/// Builds a study whose support points are the fixture's literal measured
/// rows, imported with `force` so the table is replayed verbatim.
///
/// The widened fixture replays on top of its narrower predecessor: the
/// narrow table's initial rows, measured incremental rows and reference row
/// come first, then the widened table's own rows.
Study replay_study(std::string_view fixture, const StudyConfig& config, const ReplayOptions& options = {});

}  // namespace splinenas
