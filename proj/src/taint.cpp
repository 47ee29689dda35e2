#include "sqlgate/taint.hpp"

#include <utility>

namespace sqlgate {

TaintedString TaintedString::literal(Bytes text) {
    TaintedString ts;
    ts.segments_.push_back(Segment{std::move(text), Origin::Trusted, {}});
    return ts;
}

TaintedString TaintedString::tainted(Bytes text, std::string field_id) {
    if (field_id.empty()) throw EmptyFieldIdError{};
    TaintedString ts;
    ts.segments_.push_back(Segment{std::move(text), Origin::Tainted, std::move(field_id)});
    return ts;
}

TaintedString TaintedString::concat(const TaintedString& other) const {
    TaintedString out;
    out.segments_ = segments_;
    for (const Segment& seg : other.segments_) {
        // Merging adjacent trusted segments keeps raw() identical.
        if (seg.origin == Origin::Trusted && !out.segments_.empty() &&
            out.segments_.back().origin == Origin::Trusted) {
            out.segments_.back().text += seg.text;
        } else {
            out.segments_.push_back(seg);
        }
    }
    return out;
}

Bytes TaintedString::raw() const {
    Bytes out;
    for (const Segment& seg : segments_) out += seg.text;
    return out;
}

std::vector<std::string> TaintedString::field_ids() const {
    std::vector<std::string> out;
    for (const Segment& seg : segments_)
        if (seg.origin == Origin::Tainted) out.push_back(seg.field_id);
    return out;
}

MarkedQuery render(const TaintedString& ts, const MarkerAssignment& assignment) {
    MarkedQuery mq;
    mq.assignment = assignment;
    for (const Segment& seg : ts.segments()) {
        if (seg.origin == Origin::Trusted) {
            mq.bytes += seg.text;
            continue;
        }
        const MarkerPair* pair = assignment.find(seg.field_id);
        if (!pair) throw MissingAssignmentError{seg.field_id};
        if (pair_collides(*pair, seg.text)) throw MarkerCollisionError{seg.field_id};

        MarkerSpan span;
        span.field_id = seg.field_id;
        span.pair_id = pair->pair_id;
        span.open_begin = mq.bytes.size();
        mq.bytes += pair->open;
        span.open_end = mq.bytes.size();
        mq.bytes += seg.text;
        span.close_begin = mq.bytes.size();
        mq.bytes += pair->close;
        span.close_end = mq.bytes.size();
        mq.spans.push_back(std::move(span));
    }
    return mq;
}

Bytes strip(const MarkedQuery& mq) {
    std::size_t cursor = 0;
    Bytes out;
    for (const MarkerSpan& span : mq.spans) {
        const MarkerPair* pair = mq.assignment.find(span.field_id);
        if (!pair || span.open_begin < cursor || span.open_end > span.close_begin ||
            span.close_end > mq.bytes.size())
            throw UnbalancedMarkersError{};
        if (mq.bytes.compare(span.open_begin, span.open_end - span.open_begin, pair->open) != 0 ||
            mq.bytes.compare(span.close_begin, span.close_end - span.close_begin, pair->close) != 0)
            throw UnbalancedMarkersError{};
        out += mq.bytes.substr(cursor, span.open_begin - cursor);
        out += mq.bytes.substr(span.open_end, span.close_begin - span.open_end);
        cursor = span.close_end;
    }
    out += mq.bytes.substr(cursor);
    return out;
}

}  // namespace sqlgate
