#pragma once

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "eclearn/messages.hpp"
#include "eclearn/rng.hpp"

namespace eclearn {

// How endpoints hand messages to the transport.
using Sender = std::function<void(Envelope)>;

struct MessageLogEntry {
    MsgType type;
    std::string from;
    std::string to;
    size_t bytes;
};

// Tracks per-sender sequence numbers on the receive path.
struct SeqTracker {
    std::map<std::string, std::uint64_t> last;
    void check(const Envelope& env);
};

// In-process transport: a message bus endpoints attach to by id. Delivery is
// reliable and per-sender FIFO. Fifo order makes whole runs deterministic;
// SeededRandom picks a random sender each step (per-sender order preserved),
// which the protocol test harnesses use to explore interleavings.
class Router {
   public:
    enum class Order { Fifo, SeededRandom };

    explicit Router(Order order = Order::Fifo, std::uint64_t seed = 0)
        : order_(order), rng_(seed) {}

    void attach(const std::string& id, std::function<void(const Envelope&)> handler);
    void send(Envelope env);  // stamps the per-sender sequence number

    bool idle() const;
    bool dispatch_one();  // deliver one message; false when idle
    void run_until_idle();

    long messages_delivered() const { return messages_; }
    long bytes_delivered() const { return bytes_; }
    const std::vector<MessageLogEntry>& log() const { return log_; }

   private:
    struct Queued {
        std::uint64_t stamp;
        Envelope env;
    };

    Order order_;
    Rng rng_;
    std::map<std::string, std::function<void(const Envelope&)>> handlers_;
    std::deque<Envelope> fifo_;  // Order::Fifo
    std::map<std::string, std::deque<Queued>> by_sender_;  // Order::SeededRandom
    std::vector<std::string> sender_order_;  // deterministic iteration
    std::map<std::string, std::uint64_t> seq_;
    std::uint64_t stamp_ = 0;
    SeqTracker recv_seq_;
    std::vector<MessageLogEntry> log_;
    long messages_ = 0;
    long bytes_ = 0;
};

}  // namespace eclearn
