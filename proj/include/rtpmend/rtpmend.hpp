#pragma once

// Heuristic RTP header error recovery: match corrupted packets to ongoing
// streams by Hamming distance against predicted headers, repair by
// overwriting with the prediction, optionally drop suspiciously distant
// packets — plus a channel simulator and sweep harness to measure
// misattribution, field-error, and drop rates under Bernoulli bit noise.

#include "rtpmend/rtp_header.hpp"
#include "rtpmend/stream_db.hpp"
#include "rtpmend/matcher.hpp"
#include "rtpmend/receiver.hpp"
#include "rtpmend/channel.hpp"
#include "rtpmend/experiment.hpp"
