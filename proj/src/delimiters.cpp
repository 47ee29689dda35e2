#include "sqlgate/delimiters.hpp"

#include <set>

namespace sqlgate {

const MarkerPair* MarkerAssignment::find(const std::string& field_id) const {
    for (const auto& [id, pair] : fields)
        if (id == field_id) return &pair;
    return nullptr;
}

bool pair_collides(const MarkerPair& pair, const std::string& text) {
    return text.find(pair.open) != std::string::npos ||
           text.find(pair.close) != std::string::npos;
}

void check_pool(const std::vector<MarkerPair>& pool) {
    if (pool.empty()) throw PoolTooSmallError{};
    std::vector<std::string> all;
    for (const MarkerPair& p : pool) {
        if (p.open.empty() || p.close.empty())
            throw OverlappingMarkersError{"empty marker sequence"};
        if (p.open == p.close)
            throw OverlappingMarkersError{"open equals close"};
        all.push_back(p.open);
        all.push_back(p.close);
    }
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = 0; j < all.size(); ++j)
            if (i != j && all[j].find(all[i]) != std::string::npos)
                throw OverlappingMarkersError{"one marker sequence is a substring of another"};
}

std::vector<MarkerPair> MarkerPolicy::default_pool() {
    std::vector<MarkerPair> pool;
    for (int i = 0; i < 8; ++i) {
        MarkerPair p;
        p.open = std::string{'\x1f', static_cast<char>('A' + i)};
        p.close = std::string{'\x1f', static_cast<char>('a' + i)};
        p.pair_id = i;
        pool.push_back(std::move(p));
    }
    return pool;
}

MarkerPolicy::MarkerPolicy(std::vector<MarkerPair> pool, RotationMode mode, std::uint64_t seed,
                           int static_pair_id)
    : pool_(std::move(pool)), mode_(mode), static_pair_id_(static_pair_id), rng_(seed) {
    check_pool(pool_);
    if (mode_ == RotationMode::Dynamic && pool_.size() < 2) throw PoolTooSmallError{};
    if (mode_ == RotationMode::Static &&
        (static_pair_id_ < 0 || static_pair_id_ >= static_cast<int>(pool_.size())))
        throw OverlappingMarkersError{"static pair_id outside pool"};
}

MarkerPair MarkerPolicy::draw_next() {
    if (mode_ == RotationMode::Static) {
        last_pair_id_ = static_pair_id_;
        return pool_[static_pair_id_];
    }
    // Uniform over the pool minus the previously used pair.
    std::vector<int> candidates;
    for (const MarkerPair& p : pool_)
        if (!last_pair_id_ || p.pair_id != *last_pair_id_) candidates.push_back(p.pair_id);
    std::uniform_int_distribution<std::size_t> dist(0, candidates.size() - 1);
    int chosen = candidates[dist(rng_)];
    last_pair_id_ = chosen;
    for (const MarkerPair& p : pool_)
        if (p.pair_id == chosen) return p;
    throw OverlappingMarkersError{"pool pair_id lookup failed"};  // unreachable
}

MarkerAssignment MarkerPolicy::assign(const std::vector<std::string>& field_ids) {
    std::set<std::string> seen;
    for (const std::string& id : field_ids)
        if (!seen.insert(id).second) throw DuplicateFieldIdError{id};
    MarkerAssignment assignment;
    for (const std::string& id : field_ids)
        assignment.fields.emplace_back(id, draw_next());
    return assignment;
}

MarkerPair MarkerPolicy::reassign_on_collision(const std::string& field_id,
                                               const std::string& tainted_text, int max_attempts) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        MarkerPair pair = draw_next();
        if (!pair_collides(pair, tainted_text)) return pair;
        if (mode_ == RotationMode::Static) break;  // the fixed pair can never change
    }
    throw CollisionExhaustedError{field_id};
}

}  // namespace sqlgate
