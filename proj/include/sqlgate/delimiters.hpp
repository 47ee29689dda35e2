#ifndef SQLGATE_DELIMITERS_HPP
#define SQLGATE_DELIMITERS_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sqlgate {

struct MarkerPair {
    std::string open;
    std::string close;
    int pair_id = -1;
};

enum class RotationMode { Static, Dynamic };

class PoolTooSmallError : public std::invalid_argument {
public:
    PoolTooSmallError() : std::invalid_argument("dynamic rotation requires a pool of at least 2 pairs") {}
};

class OverlappingMarkersError : public std::invalid_argument {
public:
    explicit OverlappingMarkersError(const std::string& detail)
        : std::invalid_argument("marker pool invariant violated: " + detail) {}
};

class DuplicateFieldIdError : public std::invalid_argument {
public:
    explicit DuplicateFieldIdError(const std::string& field_id)
        : std::invalid_argument("duplicate field_id '" + field_id + "' in assignment request") {}
};

class CollisionExhaustedError : public std::runtime_error {
public:
    explicit CollisionExhaustedError(std::string field_id)
        : std::runtime_error("could not find a collision-free marker pair for field '" + field_id + "'"),
          field_id(std::move(field_id)) {}
    std::string field_id;
};

/// The marker pairs chosen for one query, in field order.
struct MarkerAssignment {
    std::vector<std::pair<std::string, MarkerPair>> fields;

    const MarkerPair* find(const std::string& field_id) const;
};

/// Owns the pair pool and the rotation state. One guard session owns one
/// policy; copies are independent streams.
///
/// The generator is std::mt19937_64; test vectors depend on it and on the
/// draw discipline (one 64-bit draw per selection).
class MarkerPolicy {
public:
    MarkerPolicy(std::vector<MarkerPair> pool, RotationMode mode, std::uint64_t seed,
                 int static_pair_id = 0);

    /// Eight 2-byte pairs prefixed with 0x1F (unit separator); bytes that
    /// never occur in SQL text and rarely in user input.
    static std::vector<MarkerPair> default_pool();

    /// Draws a pair per field. Dynamic mode never repeats the previous
    /// pair, including across queries. Advances the rotation state.
    MarkerAssignment assign(const std::vector<std::string>& field_ids);

    /// Draws until the chosen pair's bytes do not occur in tainted_text,
    /// still honoring the no-consecutive-repeat rule. Throws
    /// CollisionExhaustedError after max_attempts draws.
    MarkerPair reassign_on_collision(const std::string& field_id, const std::string& tainted_text,
                                     int max_attempts = kDefaultMaxAttempts);

    const std::vector<MarkerPair>& pool() const { return pool_; }
    RotationMode mode() const { return mode_; }
    std::optional<int> last_pair_id() const { return last_pair_id_; }

    static constexpr int kDefaultMaxAttempts = 16;

private:
    MarkerPair draw_next();

    std::vector<MarkerPair> pool_;
    RotationMode mode_;
    int static_pair_id_;
    std::mt19937_64 rng_;
    std::optional<int> last_pair_id_;
};

/// True if text contains the open or close bytes of the pair.
bool pair_collides(const MarkerPair& pair, const std::string& text);

/// Validates the pool invariants (throws on violation). Used by
/// MarkerPolicy's constructor and by config loading.
void check_pool(const std::vector<MarkerPair>& pool);

}  // namespace sqlgate

#endif
