#include "erb/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace erb {

namespace {

using json = nlohmann::ordered_json;

json dense_array(const ObsVec& v) {
    json arr = json::array();
    for (double x : v.to_dense()) arr.push_back(x);
    return arr;
}

std::vector<double> parse_vector(const json& arr, const char* field) {
    if (!arr.is_array()) throw FormatError(std::string("record field is not an array: ") + field);
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& x : arr) {
        if (!x.is_number()) throw FormatError(std::string("non-numeric entry in ") + field);
        out.push_back(x.get<double>());
    }
    return out;
}

template <typename T>
T require(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(std::string("missing header field: ") + key);
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw FormatError(std::string("header field has wrong type: ") + key);
    }
}

std::uint64_t require_u64(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(std::string("missing header field: ") + key);
    if (it->is_number_unsigned()) return it->get<std::uint64_t>();
    if (it->is_number_integer() && it->get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(it->get<std::int64_t>());
    }
    throw FormatError(std::string("header field must be a nonnegative integer: ") + key);
}

json record_json(const Experience& e, const std::uint64_t* weight) {
    json rec;
    rec["obs"] = dense_array(e.obs);
    rec["action"] = e.action;
    rec["reward"] = e.reward;
    rec["next_obs"] = dense_array(e.next_obs);
    rec["terminal"] = e.terminal;
    if (weight) rec["weight"] = *weight;
    return rec;
}

Experience record_from_json(const json& rec, std::size_t obs_dim, std::uint64_t* weight_out) {
    if (!rec.is_object()) throw FormatError("record line is not a JSON object");
    Experience e;
    e.obs = ObsVec(parse_vector(rec.at("obs"), "obs"));
    e.next_obs = ObsVec(parse_vector(rec.at("next_obs"), "next_obs"));
    if (!rec.at("action").is_number_integer()) throw FormatError("record action is not an integer");
    e.action = rec.at("action").get<std::int32_t>();
    if (!rec.at("reward").is_number()) throw FormatError("record reward is not a number");
    e.reward = rec.at("reward").get<double>();
    if (!rec.at("terminal").is_boolean()) throw FormatError("record terminal is not a boolean");
    e.terminal = rec.at("terminal").get<bool>();
    if (e.obs.dim() != obs_dim || e.next_obs.dim() != obs_dim) {
        throw FormatError("record observation length disagrees with header obs_dim");
    }
    if (weight_out) {
        const auto it = rec.find("weight");
        if (it == rec.end()) throw FormatError("compressed record is missing weight");
        if (!it->is_number_unsigned() && !it->is_number_integer()) {
            throw FormatError("record weight is not an integer");
        }
        const std::int64_t w = it->get<std::int64_t>();
        if (w < 1) throw FormatError("record weight must be a positive integer");
        *weight_out = static_cast<std::uint64_t>(w);
    }
    return e;
}

std::string next_line(std::istream& in, bool& eof) {
    std::string line;
    if (!std::getline(in, line)) {
        eof = true;
        return line;
    }
    eof = false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

json parse_line(const std::string& line, const char* what) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed ") + what + ": " + e.what());
    }
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void serialize_erb(const ReplayBuffer& buffer, std::ostream& out) {
    json header;
    header["format"] = "erb";
    header["version"] = 1;
    header["kind"] = "raw";
    header["count"] = buffer.size();
    header["obs_dim"] = buffer.obs_dim();
    header["num_actions"] = buffer.num_actions();
    header["env_id"] = buffer.env_id();
    out << header.dump() << '\n';
    for (const auto& e : buffer) {
        out << record_json(e, nullptr).dump() << '\n';
    }
    if (!out) throw IoError("failed to write ERB stream");
}

void serialize_erb(const CompressedERB& buffer, std::ostream& out) {
    buffer.validate();
    json header;
    header["format"] = "erb";
    header["version"] = 1;
    header["kind"] = "compressed";
    header["count"] = buffer.entries.size();
    header["obs_dim"] = buffer.obs_dim;
    header["num_actions"] = buffer.num_actions;
    header["env_id"] = buffer.env_id;
    header["method"] = to_string(buffer.method);
    header["ratio"] = buffer.ratio;
    header["original_size"] = buffer.original_size;
    header["seed"] = buffer.seed;
    out << header.dump() << '\n';
    for (const auto& we : buffer.entries) {
        out << record_json(we.exp, &we.weight).dump() << '\n';
    }
    if (!out) throw IoError("failed to write ERB stream");
}

AnyErb deserialize_erb(std::istream& in) {
    bool eof = false;
    const std::string header_line = next_line(in, eof);
    if (eof) throw FormatError("empty stream, expected ERB header line");
    const json header = parse_line(header_line, "header");
    if (!header.is_object()) throw FormatError("header line is not a JSON object");

    if (require<std::string>(header, "format") != "erb") throw FormatError("not an ERB file");
    const int version = require<int>(header, "version");
    if (version != 1) {
        throw FormatError("unsupported ERB version " + std::to_string(version));
    }
    const std::string kind = require<std::string>(header, "kind");
    const std::int64_t count = require<std::int64_t>(header, "count");
    if (count < 0) throw FormatError("negative record count");
    const std::int64_t obs_dim = require<std::int64_t>(header, "obs_dim");
    const int num_actions = require<int>(header, "num_actions");
    const std::string env_id = require<std::string>(header, "env_id");
    if (obs_dim <= 0) throw FormatError("header obs_dim must be positive");
    if (num_actions <= 0) throw FormatError("header num_actions must be positive");

    const auto read_records = [&](auto&& consume) {
        for (std::int64_t i = 0; i < count; ++i) {
            const std::string line = next_line(in, eof);
            if (eof) {
                throw FormatError("record count mismatch: header says " + std::to_string(count) +
                                  ", stream holds " + std::to_string(i));
            }
            consume(parse_line(line, "record"));
        }
        // Anything but trailing blank lines means the header count is wrong.
        for (;;) {
            const std::string line = next_line(in, eof);
            if (eof) break;
            if (!line.empty()) {
                throw FormatError("record count mismatch: more records than header count " +
                                  std::to_string(count));
            }
        }
    };

    if (kind == "raw") {
        ReplayBuffer buffer(static_cast<std::size_t>(obs_dim), num_actions, env_id);
        read_records([&](const json& rec) {
            buffer.append(record_from_json(rec, buffer.obs_dim(), nullptr));
        });
        return buffer;
    }
    if (kind == "compressed") {
        CompressedERB c;
        c.obs_dim = static_cast<std::size_t>(obs_dim);
        c.num_actions = num_actions;
        c.env_id = env_id;
        c.method = method_from_string(require<std::string>(header, "method"));
        c.ratio = require<double>(header, "ratio");
        c.original_size = require_u64(header, "original_size");
        c.seed = require_u64(header, "seed");
        read_records([&](const json& rec) {
            WeightedExperience we;
            we.exp = record_from_json(rec, c.obs_dim, &we.weight);
            c.entries.push_back(std::move(we));
        });
        c.validate();
        return c;
    }
    throw FormatError("unknown ERB kind: " + kind);
}

AnyErb load_erb(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    return deserialize_erb(in);
}

ReplayBuffer load_raw_erb(const std::string& path) {
    AnyErb any = load_erb(path);
    if (auto* raw = std::get_if<ReplayBuffer>(&any)) return std::move(*raw);
    throw FormatError("expected a raw ERB, got a compressed one: " + path);
}

CompressedERB load_compressed_erb(const std::string& path) {
    AnyErb any = load_erb(path);
    if (auto* c = std::get_if<CompressedERB>(&any)) return std::move(*c);
    throw FormatError("expected a compressed ERB, got a raw one: " + path);
}

namespace {
template <typename Buffer>
void save_impl(const Buffer& buffer, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    serialize_erb(buffer, out);
    out.flush();
    if (!out) throw IoError("failed writing file: " + path);
}
} // namespace

void save_erb(const ReplayBuffer& buffer, const std::string& path) { save_impl(buffer, path); }
void save_erb(const CompressedERB& buffer, const std::string& path) { save_impl(buffer, path); }

} // namespace erb
