#include "splinenas/fixtures.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "splinenas/error.hpp"

namespace splinenas {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kFixtures[];
extern const std::size_t kFixtureCount;
}  // namespace detail

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(std::string_view fixture, const std::string& cell) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw Error(ErrorKind::ParseError, std::string(fixture) + ": bad number '" + cell + "'");
    }
    return v;
}

std::optional<double> parse_optional(std::string_view fixture, const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    return parse_double(fixture, cell);
}

FixtureRowKind row_kind(std::string_view fixture, const std::string& s) {
    if (s == "initial") return FixtureRowKind::Initial;
    if (s == "incremental") return FixtureRowKind::Incremental;
    if (s == "reference") return FixtureRowKind::Reference;
    throw Error(ErrorKind::ParseError, std::string(fixture) + ": unknown row kind '" + s + "'");
}

void import_rows(Study& study, const FixtureTable& table, const ReplayOptions& options) {
    for (const auto& row : table.rows) {
        if (!row.measured || row.extrapolated) continue;
        if (row.kind == FixtureRowKind::Incremental && !options.include_incremental) continue;
        if (row.kind == FixtureRowKind::Reference && !options.include_reference) continue;
        const bool seen = std::any_of(study.points.begin(), study.points.end(),
                                      [&](const SupportPoint& p) { return p.x == row.coords; });
        if (seen) continue;
        const PointKind kind = row.kind == FixtureRowKind::Initial       ? PointKind::Initial
                               : row.kind == FixtureRowKind::Incremental ? PointKind::Incremental
                                                                         : PointKind::Imported;
        import_point(study, row.coords, *row.measured, {kind, /*force=*/true});
    }
}

}  // namespace

std::string_view to_string(FixtureRowKind kind) noexcept {
    switch (kind) {
        case FixtureRowKind::Initial: return "initial";
        case FixtureRowKind::Incremental: return "incremental";
        case FixtureRowKind::Reference: return "reference";
    }
    return "initial";
}

std::vector<const FixtureRow*> FixtureTable::rows_of(FixtureRowKind kind) const {
    std::vector<const FixtureRow*> out;
    for (const auto& r : rows) {
        if (r.kind == kind) out.push_back(&r);
    }
    return out;
}

std::vector<std::string> fixture_names() {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < detail::kFixtureCount; ++i) names.emplace_back(detail::kFixtures[i].first);
    return names;
}

std::string_view fixture_text(std::string_view name) {
    for (std::size_t i = 0; i < detail::kFixtureCount; ++i) {
        if (detail::kFixtures[i].first == name) return detail::kFixtures[i].second;
    }
    throw Error(ErrorKind::UnknownFixture, "no fixture named '" + std::string(name) + "'");
}

FixtureTable parse_fixture(std::string_view name, std::string_view csv) {
    FixtureTable table;
    table.name = std::string(name);
    std::vector<Dimension> dims;
    bool header_seen = false;

    std::istringstream in{std::string(csv)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (cells[0] == "dim") {
            if (cells.size() != 5) throw Error(ErrorKind::ParseError, table.name + ": malformed dim line");
            dims.push_back({cells[1], parse_double(name, cells[2]), parse_double(name, cells[3]), cells[4] == "1"});
            continue;
        }
        if (cells[0] == "kind") {
            if (cells.size() != dims.size() + 4) {
                throw Error(ErrorKind::ParseError, table.name + ": header does not match the dims");
            }
            for (std::size_t k = 0; k < dims.size(); ++k) {
                if (cells[k + 1] != dims[k].name) {
                    throw Error(ErrorKind::ParseError, table.name + ": header column " + cells[k + 1] +
                                                           " does not match dim " + dims[k].name);
                }
            }
            header_seen = true;
            continue;
        }
        if (!header_seen) throw Error(ErrorKind::ParseError, table.name + ": row before header");
        if (cells.size() != dims.size() + 4) {
            throw Error(ErrorKind::ParseError, table.name + ": row has " + std::to_string(cells.size()) + " cells");
        }
        FixtureRow row;
        row.kind = row_kind(name, cells[0]);
        for (std::size_t k = 0; k < dims.size(); ++k) row.coords.push_back(parse_double(name, cells[k + 1]));
        row.measured = parse_optional(name, cells[dims.size() + 1]);
        row.predicted = parse_optional(name, cells[dims.size() + 2]);
        row.extrapolated = cells[dims.size() + 3] == "1";
        table.rows.push_back(std::move(row));
    }
    table.space = ParamSpace(std::move(dims));
    for (const auto& row : table.rows) {
        if (table.space.contains(row.coords) == row.extrapolated) {
            throw Error(ErrorKind::ParseError, table.name + ": extrapolated flag disagrees with the box");
        }
    }
    return table;
}

FixtureTable load_fixture(std::string_view name) { return parse_fixture(name, fixture_text(name)); }

Study replay_study(std::string_view fixture, const StudyConfig& config, const ReplayOptions& options) {
    const FixtureTable table = load_fixture(fixture);
    const ParamSpace space(table.space.dims(), options.normalize);
    Study study = init_study(space, config, std::string(fixture), DesignMode::Skip);

    if (fixture == "table5_blresnext_1k_wide") {
        ReplayOptions narrow = options;
        narrow.include_incremental = true;
        narrow.include_reference = true;
        import_rows(study, load_fixture("table4_blresnext_1k"), narrow);
    }
    import_rows(study, table, options);
    return study;
}

}  // namespace splinenas
