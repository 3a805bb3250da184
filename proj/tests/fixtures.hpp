#pragma once

#include <string>

#include "eclearn/data.hpp"
#include "eclearn/modes.hpp"

namespace eclearn::testing {

// The two-time-point activity excerpt: two people walking, coordinates
// (201,454)/(230,440) at time 1 (euclidean distance sqrt(1037) ~ 32.2),
// directions aligned, annotated moving from time 2 on.
inline const char* kActivityExcerpt =
    "% interpretation 1\n"
    "happensAt(walk(id1),1).\n"
    "happensAt(walk(id2),1).\n"
    "holdsAt(coords(id1,201,454),1).\n"
    "holdsAt(coords(id2,230,440),1).\n"
    "holdsAt(direction(id1,270),1).\n"
    "holdsAt(direction(id2,270),1).\n"
    "happensAt(walk(id1),2).\n"
    "happensAt(walk(id2),2).\n"
    "holdsAt(coords(id1,201,454),2).\n"
    "holdsAt(coords(id2,227,440),2).\n"
    "holdsAt(direction(id1,275),2).\n"
    "holdsAt(direction(id2,278),2).\n"
    "holdsAt(moving(id1,id2),2).\n";

inline StreamSpec activity_spec(long chunk = 2) {
    StreamSpec spec;
    spec.chunk_size = chunk;
    spec.targets = {{"moving", 2}};
    return spec;
}

inline Interpretation activity_interpretation() {
    auto stream = parse_stream(kActivityExcerpt, activity_spec(2));
    return stream.at(0);
}

inline const char* kActivityModes =
    "modeh(initiatedAt(moving(+person,+person),+time)).\n"
    "modeh(terminatedAt(moving(+person,+person),+time)).\n"
    "modeb(happensAt(walk(+person),+time)).\n"
    "modeb(happensAt(inactive(+person),+time)).\n"
    "modeb(happensAt(active(+person),+time)).\n"
    "modeb(distLessThan(+person,+person,#dist,+time)).\n"
    "modeb(distMoreThan(+person,+person,#dist,+time)).\n"
    "modeb(dirLessThan(+person,+person,#angle,+time)).\n"
    "pool(dist, [25,30,40]).\n"
    "pool(angle, [45,90]).\n";

inline ModeSet activity_modes() { return parse_modes(kActivityModes); }

}  // namespace eclearn::testing
