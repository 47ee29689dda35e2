#ifndef SQLGATE_TAINT_HPP
#define SQLGATE_TAINT_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqlgate/delimiters.hpp"

namespace sqlgate {

// Queries are byte strings end to end; payloads are not assumed to be text.
using Bytes = std::string;

enum class Origin { Trusted, Tainted };

struct Segment {
    Bytes text;
    Origin origin = Origin::Trusted;
    std::string field_id;  // non-empty iff origin == Tainted
};

class EmptyFieldIdError : public std::invalid_argument {
public:
    EmptyFieldIdError() : std::invalid_argument("tainted segment requires a non-empty field_id") {}
};

/// A query under construction: an ordered sequence of trusted template
/// fragments and tainted user-input fragments. Immutable after construction.
class TaintedString {
public:
    TaintedString() = default;

    static TaintedString literal(Bytes text);
    static TaintedString tainted(Bytes text, std::string field_id);

    TaintedString concat(const TaintedString& other) const;

    /// The query text with no markers: concatenation of all segment texts.
    Bytes raw() const;

    const std::vector<Segment>& segments() const { return segments_; }

    /// field_ids of tainted segments, in order of appearance.
    std::vector<std::string> field_ids() const;

private:
    std::vector<Segment> segments_;
};

inline TaintedString operator+(const TaintedString& a, const TaintedString& b) {
    return a.concat(b);
}

/// Byte offsets of one rendered marker pair occurrence.
struct MarkerSpan {
    std::string field_id;
    int pair_id = -1;
    std::size_t open_begin = 0;   // first byte of the open marker
    std::size_t open_end = 0;     // one past the open marker
    std::size_t close_begin = 0;  // first byte of the close marker
    std::size_t close_end = 0;    // one past the close marker
};

struct MarkedQuery {
    Bytes bytes;
    MarkerAssignment assignment;
    std::vector<MarkerSpan> spans;  // in query order, one per tainted segment
};

class MarkerCollisionError : public std::runtime_error {
public:
    explicit MarkerCollisionError(std::string field_id)
        : std::runtime_error("tainted text for field '" + field_id + "' contains its assigned marker bytes"),
          field_id(std::move(field_id)) {}
    std::string field_id;
};

class MissingAssignmentError : public std::runtime_error {
public:
    explicit MissingAssignmentError(std::string field_id)
        : std::runtime_error("no marker pair assigned for field '" + field_id + "'"),
          field_id(std::move(field_id)) {}
    std::string field_id;
};

class UnbalancedMarkersError : public std::runtime_error {
public:
    UnbalancedMarkersError() : std::runtime_error("marked query has corrupt or unbalanced markers") {}
};

/// Wraps every tainted segment in its assigned marker pair. Trusted text
/// passes through untouched. Throws MarkerCollisionError if a tainted text
/// contains its own pair's bytes (the caller re-draws, never escapes).
MarkedQuery render(const TaintedString& ts, const MarkerAssignment& assignment);

/// Removes the markers, yielding the database-ready bytes. Equals raw() of
/// the source TaintedString. Throws UnbalancedMarkersError on corrupt input.
Bytes strip(const MarkedQuery& mq);

}  // namespace sqlgate

#endif
