#include "cook/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "cook/errors.hpp"

namespace cook {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::BlockExec: return "block-exec";
        case EventKind::ContextSwitch: return "context-switch";
        case EventKind::LockAcquire: return "lock-acquire";
        case EventKind::LockRelease: return "lock-release";
        case EventKind::Callback: return "callback";
    }
    return "?";
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "block-exec") return EventKind::BlockExec;
    if (s == "context-switch") return EventKind::ContextSwitch;
    if (s == "lock-acquire") return EventKind::LockAcquire;
    if (s == "lock-release") return EventKind::LockRelease;
    if (s == "callback") return EventKind::Callback;
    throw IoError("unknown trace event kind: " + s);
}

void Trace::write_csv(std::ostream& out) const {
    out << "app,kernel,block,sm,start,end,kind\n";
    for (const auto& ev : events_) {
        out << ev.app << ',' << ev.op << ',' << ev.block << ',' << ev.sm << ','
            << ev.start << ',' << ev.end << ',' << to_string(ev.kind) << '\n';
    }
}

std::string Trace::to_csv() const {
    std::ostringstream ss;
    write_csv(ss);
    return ss.str();
}

void Trace::write_json(std::ostream& out) const {
    out << "[\n";
    for (std::size_t i = 0; i < events_.size(); ++i) {
        const auto& ev = events_[i];
        out << "  {\"app\":" << ev.app << ",\"kernel\":" << ev.op
            << ",\"block\":" << ev.block << ",\"sm\":" << ev.sm
            << ",\"start\":" << ev.start << ",\"end\":" << ev.end
            << ",\"kind\":\"" << to_string(ev.kind) << "\"}";
        if (i + 1 < events_.size()) out << ',';
        out << '\n';
    }
    out << "]\n";
}

Trace Trace::parse_csv(std::istream& in) {
    Trace t;
    std::string line;
    if (!std::getline(in, line))
        throw IoError("trace csv is empty");
    if (line != "app,kernel,block,sm,start,end,kind")
        throw IoError("trace csv has unexpected header: " + line);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        TraceEvent ev;
        char c = 0;
        std::int64_t app = 0, op = 0, block = 0, sm = 0;
        std::uint64_t start = 0, end = 0;
        std::string kind;
        if (!(ss >> app >> c && c == ',' && ss >> op >> c && c == ',' &&
              ss >> block >> c && c == ',' && ss >> sm >> c && c == ',' &&
              ss >> start >> c && c == ',' && ss >> end >> c && c == ',' &&
              std::getline(ss, kind)))
            throw IoError("malformed trace csv row at line " + std::to_string(lineno));
        ev.app = static_cast<AppId>(app);
        ev.op = op;
        ev.block = static_cast<int>(block);
        ev.sm = static_cast<int>(sm);
        ev.start = start;
        ev.end = end;
        ev.kind = event_kind_from_string(kind);
        t.append(ev);
    }
    return t;
}

namespace {
const char* kRecordsHeader = "id,app,kind,kernel,issue,stream,enqueue,start,end,args_hash,completion_seq";
}

void write_records_csv(const std::vector<OpRecord>& records, std::ostream& out) {
    out << kRecordsHeader << '\n';
    for (const OpRecord& r : records) {
        out << r.id << ',' << r.app << ',' << r.kind << ',' << r.kernel << ','
            << r.issue_index << ',' << r.stream << ',' << r.enqueue << ',' << r.start
            << ',' << r.end << ',' << r.args_hash << ',' << r.completion_seq << '\n';
    }
}

std::string records_to_csv(const std::vector<OpRecord>& records) {
    std::ostringstream ss;
    write_records_csv(records, ss);
    return ss.str();
}

std::vector<OpRecord> parse_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("records csv is empty");
    if (line != kRecordsHeader)
        throw IoError("records csv has unexpected header: " + line);
    std::vector<OpRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        OpRecord r;
        char c = 0;
        std::int64_t app = 0, kind = 0, kernel = 0, issue = 0, stream = 0;
        if (!(ss >> r.id >> c && c == ',' && ss >> app >> c && c == ',' &&
              ss >> kind >> c && c == ',' && ss >> kernel >> c && c == ',' &&
              ss >> issue >> c && c == ',' && ss >> stream >> c && c == ',' &&
              ss >> r.enqueue >> c && c == ',' && ss >> r.start >> c && c == ',' &&
              ss >> r.end >> c && c == ',' && ss >> r.args_hash >> c && c == ',' &&
              ss >> r.completion_seq))
            throw IoError("malformed records csv row at line " + std::to_string(lineno));
        r.app = static_cast<AppId>(app);
        r.kind = static_cast<int>(kind);
        r.kernel = static_cast<KernelId>(kernel);
        r.issue_index = static_cast<int>(issue);
        r.stream = static_cast<StreamId>(stream);
        out.push_back(r);
    }
    return out;
}

}  // namespace cook
