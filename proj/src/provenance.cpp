#include "designctl/provenance.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

namespace designctl::prov {

namespace {

bool kind_can_parent(ArtifactKind parent, ArtifactKind child) {
    // legal lineage: data_source -> dataset -> model -> card
    switch (child) {
        case ArtifactKind::data_source: return false;  // roots have no parents
        case ArtifactKind::dataset: return parent == ArtifactKind::data_source;
        case ArtifactKind::model: return parent == ArtifactKind::dataset;
        case ArtifactKind::card: return parent == ArtifactKind::model;
    }
    return false;
}

}  // namespace

bool Digest::valid() const {
    if (hex.size() != 64) return false;
    return std::all_of(hex.begin(), hex.end(), [](char ch) {
        return (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f');
    });
}

std::string_view to_string(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::data_source: return "data_source";
        case ArtifactKind::dataset: return "dataset";
        case ArtifactKind::model: return "model";
        case ArtifactKind::card: return "card";
    }
    return "data_source";
}

ArtifactKind artifact_kind_from_string(std::string_view s) {
    if (s == "data_source") return ArtifactKind::data_source;
    if (s == "dataset") return ArtifactKind::dataset;
    if (s == "model") return ArtifactKind::model;
    if (s == "card") return ArtifactKind::card;
    throw Error("SchemaViolation", "unknown artifact kind '" + std::string(s) + "'");
}

std::string_view to_string(RegistryStatus s) {
    switch (s) {
        case RegistryStatus::candidate: return "candidate";
        case RegistryStatus::approved: return "approved";
        case RegistryStatus::deployed_locked: return "deployed_locked";
    }
    return "candidate";
}

RegistryStatus registry_status_from_string(std::string_view s) {
    if (s == "candidate") return RegistryStatus::candidate;
    if (s == "approved") return RegistryStatus::approved;
    if (s == "deployed_locked") return RegistryStatus::deployed_locked;
    throw Error("SchemaViolation", "unknown registry status '" + std::string(s) + "'");
}

Digest digest_bytes(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &md_len, EVP_sha256(), nullptr) != 1) {
        throw Error("DigestFailed", "EVP_Digest failed");
    }
    static constexpr char hex_chars[] = "0123456789abcdef";
    std::string hex(md_len * 2, '0');
    for (unsigned int i = 0; i < md_len; ++i) {
        hex[2 * i] = hex_chars[md[i] >> 4];
        hex[2 * i + 1] = hex_chars[md[i] & 0x0f];
    }
    return Digest{std::move(hex)};
}

Digest digest_artifact(std::string_view bytes, ArtifactKind kind) {
    if (kind == ArtifactKind::card) {
        return digest_bytes(canonicalize(bytes));
    }
    return digest_bytes(bytes);
}

json ProvenanceRecord::to_json() const {
    json parents_json = json::array();
    for (const auto& p : parents) parents_json.push_back(p.hex);
    return json{{"subject", subject.hex},
                {"kind", std::string(to_string(kind))},
                {"parents", std::move(parents_json)},
                {"created_at", created_at},
                {"note", note}};
}

ProvenanceRecord ProvenanceRecord::from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw Error("SchemaViolation", "record must be an object", where);
    ProvenanceRecord r;
    auto need = [&](const char* key) -> const json& {
        auto it = j.find(key);
        if (it == j.end()) {
            throw Error("SchemaViolation", std::string("record missing '") + key + "'", where);
        }
        return *it;
    };
    r.subject.hex = need("subject").get<std::string>();
    if (!r.subject.valid()) throw Error("SchemaViolation", "subject is not a sha-256 hex digest", where);
    r.kind = artifact_kind_from_string(need("kind").get<std::string>());
    for (const auto& p : need("parents")) {
        Digest d{p.get<std::string>()};
        if (!d.valid()) throw Error("SchemaViolation", "parent is not a sha-256 hex digest", where);
        r.parents.push_back(std::move(d));
    }
    if (auto it = j.find("created_at"); it != j.end()) r.created_at = it->get<std::string>();
    if (auto it = j.find("note"); it != j.end()) r.note = it->get<std::string>();
    return r;
}

json ModelRegistryEntry::to_json() const {
    return json{{"model_digest", model_digest.hex},
                {"card_digest", card_digest.hex},
                {"status", std::string(to_string(status))}};
}

ModelRegistryEntry ModelRegistryEntry::from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw Error("SchemaViolation", "registry entry must be an object", where);
    ModelRegistryEntry e;
    auto need = [&](const char* key) -> const json& {
        auto it = j.find(key);
        if (it == j.end()) {
            throw Error("SchemaViolation", std::string("registry entry missing '") + key + "'",
                        where);
        }
        return *it;
    };
    e.model_digest.hex = need("model_digest").get<std::string>();
    e.card_digest.hex = need("card_digest").get<std::string>();
    if (!e.model_digest.valid() || !e.card_digest.valid()) {
        throw Error("SchemaViolation", "registry digests must be sha-256 hex", where);
    }
    e.status = registry_status_from_string(need("status").get<std::string>());
    return e;
}

Chain verify_chain(const std::vector<ProvenanceRecord>& store, const Digest& target) {
    // first occurrence wins; the store is append-ordered
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < store.size(); ++i) {
        index.emplace(store[i].subject.hex, i);
    }
    auto target_it = index.find(target.hex);
    if (target_it == index.end()) {
        throw Error("UnknownDigest", "digest was never recorded", target.hex);
    }

    std::set<std::size_t> closure;
    std::vector<std::size_t> frontier{target_it->second};
    closure.insert(target_it->second);
    while (!frontier.empty()) {
        std::size_t current = frontier.back();
        frontier.pop_back();
        const ProvenanceRecord& record = store[current];
        for (const auto& parent : record.parents) {
            auto it = index.find(parent.hex);
            if (it == index.end()) {
                throw Error("BrokenChain",
                            "parent " + parent.hex + " of " + record.subject.hex +
                                " is not recorded",
                            parent.hex);
            }
            if (it->second >= current) {
                throw Error("BrokenChain",
                            "parent " + parent.hex + " is recorded after its child " +
                                record.subject.hex,
                            parent.hex);
            }
            if (!kind_can_parent(store[it->second].kind, record.kind)) {
                throw Error("IllegalLineage",
                            std::string(to_string(store[it->second].kind)) + " cannot parent " +
                                std::string(to_string(record.kind)),
                            record.subject.hex);
            }
            if (closure.insert(it->second).second) frontier.push_back(it->second);
        }
    }

    // Store order is a topological order (parents precede children), so
    // filtering it yields the chain with root data sources first.
    Chain chain;
    for (std::size_t i : closure) chain.push_back(store[i]);
    return chain;
}

json chain_to_json(const Chain& chain) {
    json out = json::array();
    for (const auto& record : chain) out.push_back(record.to_json());
    return out;
}

json LockedCheck::to_json() const {
    json out{{"passed", passed}};
    if (!passed) {
        out["code"] = code;
        out["message"] = message;
    }
    return out;
}

LockedCheck check_locked(const Digest& deployed_model,
                         const std::vector<ModelRegistryEntry>& registry) {
    for (const auto& entry : registry) {
        if (entry.status == RegistryStatus::deployed_locked &&
            entry.model_digest == deployed_model) {
            return {true, "", ""};
        }
    }
    std::string message = "deployed model " + deployed_model.hex +
                          " does not match any deployed_locked registry entry";
    auto approved = std::find_if(registry.begin(), registry.end(), [](const auto& e) {
        return e.status == RegistryStatus::approved;
    });
    if (approved != registry.end()) {
        message += "; nearest approved model is " + approved->model_digest.hex;
    } else {
        message += "; registry holds no approved model";
    }
    return {false, "LOCKED_VIOLATION", std::move(message)};
}

bool transition_allowed(RegistryStatus from, RegistryStatus to) {
    return (from == RegistryStatus::candidate && to == RegistryStatus::approved) ||
           (from == RegistryStatus::approved && to == RegistryStatus::deployed_locked);
}

void apply_transition(ModelRegistryEntry& entry, RegistryStatus to) {
    if (!transition_allowed(entry.status, to)) {
        throw Error("IllegalTransition",
                    std::string(to_string(entry.status)) + " -> " +
                        std::string(to_string(to)) + " is not a legal registry transition",
                    entry.model_digest.hex);
    }
    entry.status = to;
}

json Overlap::to_json() const {
    return json{{"count", count}, {"sample", sample}};
}

Overlap digest_list_overlap(std::vector<std::string> a, std::vector<std::string> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::string> shared;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
    shared.erase(std::unique(shared.begin(), shared.end()), shared.end());
    Overlap overlap;
    overlap.count = shared.size();
    const std::size_t sample_size = std::min<std::size_t>(shared.size(), 10);
    overlap.sample.assign(shared.begin(), shared.begin() + static_cast<long>(sample_size));
    return overlap;
}

Overlap dataset_overlap(const card::Dataset& a, const card::Dataset& b) {
    if (!a.record_digests || !b.record_digests) {
        throw Error("DigestsUnavailable",
                    "dataset '" + (a.record_digests ? b.name : a.name) +
                        "' carries no record digests");
    }
    return digest_list_overlap(*a.record_digests, *b.record_digests);
}

std::vector<ProvenanceRecord> load_store(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("ParseError", "cannot open provenance store", path.string());
    std::vector<ProvenanceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        records.push_back(ProvenanceRecord::from_json(parse_json(line, where), where));
    }
    return records;
}

void append_record(const std::filesystem::path& path, const ProvenanceRecord& record) {
    std::string line = canonical_dump(record.to_json()) + "\n";
    std::FILE* f = std::fopen(path.c_str(), "a");
    if (f == nullptr) throw Error("IoError", "cannot open provenance store", path.string());
    int fd = fileno(f);
    if (flock(fd, LOCK_EX) != 0) {
        std::fclose(f);
        throw Error("IoError", "cannot lock provenance store", path.string());
    }
    std::fwrite(line.data(), 1, line.size(), f);
    std::fflush(f);
    flock(fd, LOCK_UN);
    std::fclose(f);
}

std::vector<ModelRegistryEntry> load_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("ParseError", "cannot open registry", path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    json doc = parse_json(buffer.str(), path.string());
    if (!doc.is_array()) {
        throw Error("SchemaViolation", "registry must be a JSON array", path.string());
    }
    std::vector<ModelRegistryEntry> entries;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        entries.push_back(ModelRegistryEntry::from_json(
            doc[i], path.string() + "[" + std::to_string(i) + "]"));
    }
    return entries;
}

void save_registry(const std::filesystem::path& path,
                   const std::vector<ModelRegistryEntry>& entries) {
    json doc = json::array();
    for (const auto& entry : entries) doc.push_back(entry.to_json());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("IoError", "cannot write registry", path.string());
    out << canonical_dump(doc) << "\n";
}

}  // namespace designctl::prov
