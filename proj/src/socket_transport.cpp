#include "eclearn/socket_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "eclearn/codec.hpp"
#include "eclearn/driver.hpp"
#include "eclearn/mediator.hpp"

namespace eclearn {

namespace {

void write_all(int fd, const std::uint8_t* data, size_t n) {
    size_t off = 0;
    while (off < n) {
        ssize_t w = ::write(fd, data + off, n - off);
        if (w < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("socket write failed: ") + std::strerror(errno));
        }
        off += static_cast<size_t>(w);
    }
}

bool read_all(int fd, std::uint8_t* data, size_t n) {
    size_t off = 0;
    while (off < n) {
        ssize_t r = ::read(fd, data + off, n - off);
        if (r == 0) return false;  // peer closed
        if (r < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("socket read failed: ") + std::strerror(errno));
        }
        off += static_cast<size_t>(r);
    }
    return true;
}

bool read_frame(int fd, std::vector<std::uint8_t>& frame) {
    std::uint8_t hdr[4];
    if (!read_all(fd, hdr, 4)) return false;
    std::uint32_t n = (static_cast<std::uint32_t>(hdr[0]) << 24) |
                      (static_cast<std::uint32_t>(hdr[1]) << 16) |
                      (static_cast<std::uint32_t>(hdr[2]) << 8) | static_cast<std::uint32_t>(hdr[3]);
    frame.assign(hdr, hdr + 4);
    frame.resize(4 + n);
    return read_all(fd, frame.data() + 4, n);
}

struct Inbox {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Envelope> q;
    std::atomic<size_t> size{0};

    void push(Envelope env) {
        {
            std::lock_guard<std::mutex> lock(mu);
            q.push_back(std::move(env));
            size.store(q.size());
        }
        cv.notify_one();
    }
    bool pop(Envelope& out, int timeout_ms) {
        std::unique_lock<std::mutex> lock(mu);
        if (!cv.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                         [this] { return !q.empty(); }))
            return false;
        out = std::move(q.front());
        q.pop_front();
        size.store(q.size());
        return true;
    }
};

}  // namespace

SocketGroupResult run_socket_group(ClauseKind kind, int k, const ModeSet& modes,
                                   const HoeffdingParams& params, std::uint64_t seed,
                                   NodeOptions options,
                                   const std::vector<std::vector<Interpretation>>& substreams,
                                   const std::string& host, int port) {
    if (static_cast<int>(substreams.size()) != k)
        throw std::logic_error("substream count does not match node count");

    int listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd < 0) throw TransportError("cannot create listen socket");
    int one = 1;
    ::setsockopt(listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd);
        throw TransportError("bad socket host: " + host);
    }
    if (::bind(listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(listen_fd, k) != 0) {
        ::close(listen_fd);
        throw TransportError(std::string("cannot bind/listen: ") + std::strerror(errno));
    }
    socklen_t alen = sizeof addr;
    ::getsockname(listen_fd, reinterpret_cast<sockaddr*>(&addr), &alen);
    std::uint16_t bound_port = ntohs(addr.sin_port);

    const std::string med_id = mediator_name(kind);
    std::vector<std::string> ids;
    for (int i = 0; i < k; ++i) ids.push_back(node_name(kind, i));

    // ── Hub state ──
    std::mutex hub_mu;
    std::map<std::string, int> fd_of;
    std::map<std::string, std::uint64_t> hub_seq;  // mediator + forwarding stamps
    std::atomic<long> frames{0}, frame_bytes{0};
    std::atomic<long> delivered_to_nodes{0};
    std::atomic<bool> stop{false};

    auto hub_write = [&](const std::string& to, const std::vector<std::uint8_t>& frame) {
        std::lock_guard<std::mutex> lock(hub_mu);
        auto it = fd_of.find(to);
        if (it == fd_of.end()) throw TransportError("frame for unknown endpoint " + to);
        write_all(it->second, frame.data(), frame.size());
        delivered_to_nodes.fetch_add(1);
    };

    Sender mediator_send = [&](Envelope env) {
        env.seq = ++hub_seq[env.sender];
        auto frame = encode_message(env);
        frames.fetch_add(1);
        frame_bytes.fetch_add(static_cast<long>(frame.size()));
        hub_write(env.to, frame);
    };
    std::mutex med_mu;
    Mediator mediator(med_id, ids, seed, mediator_send);

    std::thread hub([&] {
        std::vector<int> conns;
        std::map<int, SeqTracker> trackers;
        for (int i = 0; i < k; ++i) {
            int fd = ::accept(listen_fd, nullptr, nullptr);
            if (fd < 0) throw TransportError("accept failed");
            // Hello frame names the endpoint.
            std::vector<std::uint8_t> frame;
            if (!read_frame(fd, frame)) throw TransportError("connection closed before hello");
            size_t off = 0;
            Envelope hello = decode_message(frame, off);
            std::lock_guard<std::mutex> lock(hub_mu);
            fd_of[hello.sender] = fd;
            conns.push_back(fd);
        }
        // Route frames until every node disconnects.
        std::vector<pollfd> pfds;
        for (int fd : conns) pfds.push_back({fd, POLLIN, 0});
        size_t open = pfds.size();
        std::vector<std::uint8_t> frame;
        while (open > 0) {
            int rc = ::poll(pfds.data(), pfds.size(), 50);
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw TransportError("hub poll failed");
            }
            for (pollfd& p : pfds) {
                if (!(p.revents & (POLLIN | POLLHUP))) continue;
                if (!read_frame(p.fd, frame)) {
                    p.fd = -p.fd - 1;  // disable
                    --open;
                    continue;
                }
                size_t off = 0;
                Envelope env = decode_message(frame, off);
                frames.fetch_add(1);
                frame_bytes.fetch_add(static_cast<long>(frame.size()));
                if (env.to == med_id) {
                    std::lock_guard<std::mutex> lock(med_mu);
                    mediator.handle(env);
                } else {
                    hub_write(env.to, frame);
                }
            }
        }
    });

    // ── Node threads ──
    struct NodeRt {
        std::unique_ptr<LearnerNode> node;
        Inbox inbox;
        int fd = -1;
        std::atomic<bool> idle{false};
        std::atomic<long> processed{0};
        std::atomic<long> sent{0};
        std::thread worker;
        std::thread reader;
        std::exception_ptr error;
    };
    std::vector<std::unique_ptr<NodeRt>> rts;
    for (int i = 0; i < k; ++i) rts.push_back(std::make_unique<NodeRt>());

    for (int i = 0; i < k; ++i) {
        NodeRt& rt = *rts[static_cast<size_t>(i)];
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw TransportError("cannot create node socket");
        sockaddr_in peer{};
        peer.sin_family = AF_INET;
        peer.sin_port = htons(bound_port);
        ::inet_pton(AF_INET, host.c_str(), &peer.sin_addr);
        if (::connect(fd, reinterpret_cast<sockaddr*>(&peer), sizeof peer) != 0) {
            ::close(fd);
            throw TransportError(std::string("cannot connect to hub: ") + std::strerror(errno));
        }
        rt.fd = fd;

        std::vector<std::string> peers;
        for (const std::string& other : ids) {
            if (other != ids[static_cast<size_t>(i)]) peers.push_back(other);
        }
        auto seq = std::make_shared<std::uint64_t>(0);
        Sender send = [fd, seq, &rt](Envelope env) {
            env.seq = ++*seq;
            auto frame = encode_message(env);
            write_all(fd, frame.data(), frame.size());
            rt.sent.fetch_add(1);
        };
        rt.node = std::make_unique<LearnerNode>(ids[static_cast<size_t>(i)], kind, modes, params,
                                                peers, med_id, send, options);

        Envelope hello;
        hello.sender = ids[static_cast<size_t>(i)];
        hello.to = "hub";
        hello.msg.type = MsgType::Proceed;
        hello.msg.purpose = "hello";
        hello.seq = ++*seq;
        auto hello_frame = encode_message(hello);
        write_all(fd, hello_frame.data(), hello_frame.size());
    }

    for (int i = 0; i < k; ++i) {
        NodeRt& rt = *rts[static_cast<size_t>(i)];
        rt.reader = std::thread([&rt] {
            try {
                std::vector<std::uint8_t> frame;
                while (read_frame(rt.fd, frame)) {
                    size_t off = 0;
                    rt.inbox.push(decode_message(frame, off));
                }
            } catch (...) {
                // socket torn down at shutdown
            }
        });
        const std::vector<Interpretation>& stream = substreams[static_cast<size_t>(i)];
        rt.worker = std::thread([&rt, &stream, &stop] {
            try {
                size_t pos = 0;
                while (true) {
                    Envelope env;
                    if (rt.inbox.pop(env, 1)) {
                        rt.idle.store(false);
                        rt.node->handle(env);
                        rt.processed.fetch_add(1);
                        continue;
                    }
                    if (!rt.node->blocked() && pos < stream.size()) {
                        rt.idle.store(false);
                        rt.node->process_interpretation(stream[pos++]);
                        continue;
                    }
                    bool done = pos == stream.size() && !rt.node->blocked() &&
                                rt.inbox.size.load() == 0;
                    rt.idle.store(done);
                    if (done && stop.load()) return;
                }
            } catch (...) {
                rt.error = std::current_exception();
                rt.idle.store(true);
            }
        });
    }

    // Quiescence: all nodes idle and every frame accounted for, stable twice.
    int stable = 0;
    while (stable < 3) {
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        bool all_idle = true;
        long sent_total = 0, processed_total = 0;
        for (auto& rt : rts) {
            if (!rt->idle.load()) all_idle = false;
            sent_total += rt->sent.load();
            processed_total += rt->processed.load();
        }
        bool med_idle;
        {
            std::lock_guard<std::mutex> lock(med_mu);
            med_idle = mediator.idle();
        }
        bool settled = all_idle && med_idle && processed_total == delivered_to_nodes.load();
        (void)sent_total;
        stable = settled ? stable + 1 : 0;
    }
    stop.store(true);
    for (auto& rt : rts) rt->worker.join();
    for (auto& rt : rts) ::shutdown(rt->fd, SHUT_RDWR);
    for (auto& rt : rts) rt->reader.join();
    for (auto& rt : rts) ::close(rt->fd);
    hub.join();
    ::close(listen_fd);

    for (auto& rt : rts) {
        if (rt->error) std::rethrow_exception(rt->error);
    }

    SocketGroupResult out;
    out.messages = frames.load();
    out.bytes = frame_bytes.load();
    for (auto& rt : rts) {
        out.theories.push_back(rt->node->theory());
        out.clauses_generated += rt->node->metrics().clauses_generated;
    }
    out.clauses_pruned = rts.front()->node->metrics().clauses_pruned;
    return out;
}

}  // namespace eclearn
