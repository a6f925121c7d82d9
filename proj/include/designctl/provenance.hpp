#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "designctl/canonical.hpp"
#include "designctl/common.hpp"
#include "designctl/modelcard.hpp"

namespace designctl::prov {

inline constexpr std::string_view kDigestAlgorithm = "sha-256";

struct Digest {
    std::string hex;  // 64 lowercase hex chars

    bool valid() const;
    bool operator==(const Digest&) const = default;
    auto operator<=>(const Digest&) const = default;
};

enum class ArtifactKind { data_source, dataset, model, card };

std::string_view to_string(ArtifactKind k);
ArtifactKind artifact_kind_from_string(std::string_view s);

struct ProvenanceRecord {
    Digest subject;
    ArtifactKind kind = ArtifactKind::data_source;
    std::vector<Digest> parents;
    std::string created_at;  // ISO-8601
    std::string note;

    json to_json() const;
    static ProvenanceRecord from_json(const json& j, const std::string& where = {});
};

enum class RegistryStatus { candidate, approved, deployed_locked };

std::string_view to_string(RegistryStatus s);
RegistryStatus registry_status_from_string(std::string_view s);

struct ModelRegistryEntry {
    Digest model_digest;
    Digest card_digest;
    RegistryStatus status = RegistryStatus::candidate;

    json to_json() const;
    static ModelRegistryEntry from_json(const json& j, const std::string& where = {});
};

// SHA-256 over raw bytes.
Digest digest_bytes(std::string_view bytes);

// For kind=card the bytes are canonicalized JSON before hashing, so the
// digest is invariant under key reordering and whitespace.
Digest digest_artifact(std::string_view bytes, ArtifactKind kind);

using Chain = std::vector<ProvenanceRecord>;

// Full ancestor closure of target (target included, last), parents
// before children, root data sources first. Throws UnknownDigest,
// BrokenChain (names the missing parent), IllegalLineage (parent kind
// that cannot produce the child kind; legal lineage is
// data_source -> dataset -> model -> card).
Chain verify_chain(const std::vector<ProvenanceRecord>& store, const Digest& target);

json chain_to_json(const Chain& chain);

struct LockedCheck {
    bool passed = false;
    std::string code;     // "LOCKED_VIOLATION" when failed
    std::string message;  // names the nearest approved digest if any

    json to_json() const;
};

LockedCheck check_locked(const Digest& deployed_model,
                         const std::vector<ModelRegistryEntry>& registry);

// Only candidate->approved and approved->deployed_locked are legal;
// deployed_locked entries are immutable.
bool transition_allowed(RegistryStatus from, RegistryStatus to);

// Throws Error("IllegalTransition").
void apply_transition(ModelRegistryEntry& entry, RegistryStatus to);

struct Overlap {
    std::size_t count = 0;
    std::vector<std::string> sample;  // <=10 lexicographically smallest

    json to_json() const;
};

// Throws Error("DigestsUnavailable") when either dataset lacks record digests.
Overlap dataset_overlap(const card::Dataset& a, const card::Dataset& b);

Overlap digest_list_overlap(std::vector<std::string> a, std::vector<std::string> b);

// provenance.jsonl: one canonical-JSON record per line, append-only.
std::vector<ProvenanceRecord> load_store(const std::filesystem::path& path);
// Appends under an exclusive advisory lock (flock) on the store file.
void append_record(const std::filesystem::path& path, const ProvenanceRecord& record);

// registry.json: canonical JSON array of entries.
std::vector<ModelRegistryEntry> load_registry(const std::filesystem::path& path);
void save_registry(const std::filesystem::path& path,
                   const std::vector<ModelRegistryEntry>& entries);

}  // namespace designctl::prov
