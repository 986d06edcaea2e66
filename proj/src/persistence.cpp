#include "splinenas/persistence.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "splinenas/error.hpp"

namespace splinenas {

using nlohmann::json;

namespace {

// Accepts numbers and the spellings of non-finite values; the latter then
// fail invariant checks rather than parsing.
double number(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "NaN" || s == "nan") return std::nan("");
        if (s == "Infinity" || s == "inf") return HUGE_VAL;
        if (s == "-Infinity" || s == "-inf") return -HUGE_VAL;
    }
    throw Error(ErrorKind::ParseError, std::string(what) + " is not a number");
}

const json& field(const json& obj, const char* key) {
    if (!obj.is_object()) throw Error(ErrorKind::ParseError, std::string("expected an object around '") + key + "'");
    auto it = obj.find(key);
    if (it == obj.end()) throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
    return *it;
}

Point point_from(const json& j, const char* what) {
    if (!j.is_array()) throw Error(ErrorKind::ParseError, std::string(what) + " is not an array");
    Point p;
    p.reserve(j.size());
    for (const auto& v : j) p.push_back(number(v, what));
    return p;
}

json to_json(const SupportPoint& p) {
    json j = {{"x", p.x}, {"y", p.y}, {"kind", to_string(p.kind)}};
    if (p.forced) j["forced"] = true;
    return j;
}

SupportPoint support_point_from(const json& j) {
    SupportPoint p;
    p.x = point_from(field(j, "x"), "x");
    p.y = number(field(j, "y"), "y");
    p.kind = point_kind_from_string(field(j, "kind").get<std::string>());
    p.forced = j.value("forced", false);
    return p;
}

json to_json(const SearchConfig& s) {
    return {{"samples_per_level", s.samples_per_level},
            {"levels", s.levels},
            {"shrink_factor", s.shrink_factor},
            {"stall_tolerance", s.stall_tolerance},
            {"max_total_samples", s.max_total_samples}};
}

json to_json(const StudyConfig& c) {
    return {{"direction", to_string(c.direction)},
            {"epsilon", c.epsilon},
            {"residual_tol", c.residual_tol},
            {"delta_min", c.delta_min},
            {"max_evaluations", c.max_evaluations},
            {"search", to_json(c.search)}};
}

StudyConfig config_from(const json& j) {
    StudyConfig c;
    c.direction = direction_from_string(field(j, "direction").get<std::string>());
    c.epsilon = number(field(j, "epsilon"), "epsilon");
    c.residual_tol = number(field(j, "residual_tol"), "residual_tol");
    c.delta_min = number(field(j, "delta_min"), "delta_min");
    c.max_evaluations = field(j, "max_evaluations").get<std::size_t>();
    const auto& s = field(j, "search");
    c.search.samples_per_level = field(s, "samples_per_level").get<std::size_t>();
    c.search.levels = field(s, "levels").get<std::size_t>();
    c.search.shrink_factor = number(field(s, "shrink_factor"), "shrink_factor");
    c.search.stall_tolerance = number(field(s, "stall_tolerance"), "stall_tolerance");
    c.search.max_total_samples = field(s, "max_total_samples").get<std::size_t>();
    return c;
}

void dump_number(std::ostream& os, const json& j) {
    if (j.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
        os << buf;
    } else {
        os << j.dump();
    }
}

void dump(std::ostream& os, const json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    if (j.is_object()) {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {  // std::map storage: sorted keys
            if (!first) os << ",\n";
            first = false;
            os << inner << json(key).dump() << ": ";
            dump(os, value, indent + 1);
        }
        os << "\n" << pad << "}";
    } else if (j.is_array()) {
        const bool scalars = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
        if (j.empty()) {
            os << "[]";
        } else if (scalars) {
            os << "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                dump(os, j[i], indent + 1);
            }
            os << "]";
        } else {
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << inner;
                dump(os, j[i], indent + 1);
            }
            os << "\n" << pad << "]";
        }
    } else if (j.is_number()) {
        dump_number(os, j);
    } else {
        os << j.dump();
    }
}

}  // namespace

json to_json(const ParamSpace& space) {
    json dims = json::array();
    for (const auto& d : space.dims()) {
        dims.push_back({{"name", d.name}, {"min", d.min}, {"max", d.max}, {"integer", d.integer}});
    }
    return {{"dims", dims}, {"normalize", space.normalize()}};
}

ParamSpace space_from_json(const json& j) {
    std::vector<Dimension> dims;
    const auto& arr = field(j, "dims");
    if (!arr.is_array()) throw Error(ErrorKind::ParseError, "dims is not an array");
    for (const auto& d : arr) {
        dims.push_back({field(d, "name").get<std::string>(), number(field(d, "min"), "min"),
                        number(field(d, "max"), "max"), d.value("integer", false)});
    }
    return ParamSpace(std::move(dims), j.value("normalize", true));
}

json to_json(const Study& study) {
    json points = json::array();
    for (const auto& p : study.points) points.push_back(to_json(p));
    json queue = json::array();
    for (const auto& q : study.design_queue) queue.push_back(q);
    json history = json::array();
    for (const auto& e : study.history) {
        json ev = {{"seq", e.seq}, {"action", e.action}, {"x", e.x}};
        if (e.y) ev["y"] = *e.y;
        if (e.predicted) ev["predicted"] = *e.predicted;
        history.push_back(std::move(ev));
    }

    json s = {{"id", study.id},
              {"space", to_json(study.space)},
              {"config", to_json(study.config)},
              {"points", points},
              {"design_queue", queue},
              {"phase", to_string(study.phase)}};
    if (study.pending) {
        json pending = {{"x", study.pending->x}, {"rationale", to_string(study.pending->rationale)}};
        if (study.pending->predicted) pending["predicted"] = *study.pending->predicted;
        s["pending"] = std::move(pending);
    }
    if (study.x_top) s["x_top"] = to_json(*study.x_top);
    return {{"format_version", kStudyFormatVersion}, {"study", s}, {"history", history}};
}

Study study_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::ParseError, "study file is not a JSON object");
    const auto& version = field(doc, "format_version");
    if (!version.is_number_integer() || version.get<int>() != kStudyFormatVersion) {
        throw Error(ErrorKind::VersionMismatch, "format_version " + version.dump() + " is not supported (expected " +
                                                    std::to_string(kStudyFormatVersion) + ")");
    }

    Study study;
    try {
        const auto& s = field(doc, "study");
        study.id = field(s, "id").get<std::string>();
        try {
            study.space = space_from_json(field(s, "space"));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ParseError) throw;
            throw Error(ErrorKind::InvariantViolation, e.what());
        }
        study.config = config_from(field(s, "config"));
        for (const auto& p : field(s, "points")) study.points.push_back(support_point_from(p));
        for (const auto& q : field(s, "design_queue")) study.design_queue.push_back(point_from(q, "design_queue"));
        study.phase = phase_from_string(field(s, "phase").get<std::string>());
        if (auto it = s.find("pending"); it != s.end()) {
            Suggestion p;
            p.x = point_from(field(*it, "x"), "pending.x");
            p.rationale = rationale_from_string(field(*it, "rationale").get<std::string>());
            if (auto pr = it->find("predicted"); pr != it->end()) p.predicted = number(*pr, "predicted");
            study.pending = std::move(p);
        }
        if (auto it = s.find("x_top"); it != s.end()) study.x_top = support_point_from(*it);
        for (const auto& e : field(doc, "history")) {
            HistoryEvent ev;
            ev.seq = field(e, "seq").get<std::uint64_t>();
            ev.action = field(e, "action").get<std::string>();
            ev.x = point_from(field(e, "x"), "history.x");
            if (auto y = e.find("y"); y != e.end()) ev.y = number(*y, "history.y");
            if (auto pr = e.find("predicted"); pr != e.end()) ev.predicted = number(*pr, "history.predicted");
            study.history.push_back(std::move(ev));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }

    check_invariants(study);
    return study;
}

std::string canonical_dump(const json& j) {
    std::ostringstream os;
    dump(os, j, 0);
    os << "\n";
    return os.str();
}

void save_study(const Study& study, const std::filesystem::path& path) {
    const std::string text = canonical_dump(to_json(study));
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw Error(ErrorKind::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::IoError, "cannot replace " + path.string());
    }
}

Study load_study(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
    }
    return study_from_json(doc);
}

StudyLock::StudyLock(const std::filesystem::path& study_path) {
    auto lock_path = study_path;
    lock_path += ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorKind::IoError, "cannot open " + lock_path.string() + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw Error(ErrorKind::Locked, study_path.string() + " is in use by another process");
    }
}

StudyLock::~StudyLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

}  // namespace splinenas
