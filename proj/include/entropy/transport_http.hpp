#pragma once

// Socket backend: one HTTP POST per envelope, replies travel as independent
// envelopes in the opposite direction, so slow peers never block a request
// cycle. A small control surface (/ctrl/*) serves tooling.

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <thread>

#include "entropy/files.hpp"
#include "entropy/protocol.hpp"

namespace entropy::net {

inline std::pair<std::string, int> split_address(const std::string& addr) {
    auto pos = addr.rfind(':');
    if (pos == std::string::npos) throw std::runtime_error("address must be host:port");
    return {addr.substr(0, pos), std::stoi(addr.substr(pos + 1))};
}

class HttpNodeRunner {
  public:
    HttpNodeRunner(protocol::NodeConfig cfg, std::shared_ptr<selection::Directory> dir)
        : node_(std::move(cfg), std::move(dir)) {}

    ~HttpNodeRunner() { stop(); }

    protocol::Node& node() { return node_; }

    static double wall_now() {
        using namespace std::chrono;
        return duration<double>(system_clock::now().time_since_epoch()).count();
    }

    void start() {
        auto [host, port] = split_address(node_.config().address);

        server_.new_task_queue = [] { return new httplib::ThreadPool(4); };

        server_.Post("/envelope", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                auto env = wire::decode_envelope(
                    BytesView(reinterpret_cast<const uint8_t*>(req.body.data()), req.body.size()));
                enqueue([this, env = std::move(env)](protocol::Effects& fx) {
                    node_.on_envelope(env, wall_now(), fx);
                });
                res.status = 200;
            } catch (const std::exception& e) {
                res.status = 400;
                res.set_content(e.what(), "text/plain");
            }
        });

        server_.Post("/ctrl/store", [this](const httplib::Request& req, httplib::Response& res) {
            double expire = 0;
            if (req.has_param("expire_days"))
                expire = wall_now() + std::stod(req.get_param_value("expire_days")) * 86400.0;
            Bytes object(req.body.begin(), req.body.end());
            auto result = run_job([&](protocol::Effects& fx) {
                return node_.begin_store(view(object), node_.config().keys.seed, expire,
                                         wall_now(), fx);
            });
            if (result.state == protocol::JobState::Succeeded) {
                res.set_content(files::recipe_to_json(result.recipe).dump(2), "application/json");
            } else {
                std::string detail = result.error;
                for (const auto& s : result.chunk_status) detail += "\n" + s;
                res.status = 500;
                res.set_content(detail, "text/plain");
            }
        });

        server_.Post("/ctrl/query", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                auto recipe = files::recipe_from_json(files::json::parse(req.body));
                auto result = run_job([&](protocol::Effects& fx) {
                    return node_.begin_query(recipe, node_.config().keys.seed, wall_now(), fx);
                });
                if (result.state == protocol::JobState::Succeeded) {
                    res.set_content(std::string(result.object.begin(), result.object.end()),
                                    "application/octet-stream");
                } else {
                    std::string detail = result.error;
                    for (const auto& s : result.chunk_status) detail += "\n" + s;
                    res.status = 404;
                    res.set_content(detail, "text/plain");
                }
            } catch (const std::exception& e) {
                res.status = 400;
                res.set_content(e.what(), "text/plain");
            }
        });

        server_.Get("/ctrl/view", [this](const httplib::Request& req, httplib::Response& res) {
            if (!req.has_param("chunk")) {
                res.status = 400;
                return;
            }
            Digest256 chash = digest_from_hex(req.get_param_value("chunk"));
            auto snapshot = call<files::json>([&](protocol::Effects&) {
                files::json j;
                j["holds"] = node_.holds_fragment(chash);
                const protocol::StoredFragment* sf = node_.stored(chash);
                if (sf) j["own_index"] = sf->fragment.stream_index;
                files::json members = files::json::array();
                double now = wall_now();
                if (const protocol::GroupView* v = node_.group_view(chash)) {
                    j["alive"] = v->alive(now, node_.config().liveness());
                    for (const auto& [nid, m] : v->members) {
                        members.push_back({{"node_id", to_hex(nid)},
                                           {"address", m.address},
                                           {"index", m.fragment_index},
                                           {"last_claim", m.last_claim},
                                           {"first_seen", m.first_seen},
                                           {"fresh", now - m.last_claim <=
                                                         node_.config().liveness()}});
                    }
                } else {
                    j["alive"] = 0;
                }
                j["members"] = members;
                return j;
            });
            res.set_content(snapshot.dump(2), "application/json");
        });

        server_.Post("/ctrl/drop", [this](const httplib::Request& req, httplib::Response& res) {
            if (!req.has_param("chunk")) {
                res.status = 400;
                return;
            }
            Digest256 chash = digest_from_hex(req.get_param_value("chunk"));
            call<int>([&](protocol::Effects&) {
                node_.drop_fragment(chash, wall_now());
                return 0;
            });
            res.set_content("dropped", "text/plain");
        });

        server_.Get("/ctrl/held", [this](const httplib::Request&, httplib::Response& res) {
            auto held = call<std::vector<Digest256>>(
                [&](protocol::Effects&) { return node_.held_chunks(); });
            files::json j = files::json::array();
            for (const auto& h : held) j.push_back(to_hex(h));
            res.set_content(j.dump(), "application/json");
        });

        server_.Get("/healthz",
                    [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });

        if (!server_.bind_to_port(host, port))
            throw std::runtime_error("cannot bind " + node_.config().address);
        server_thread_ = std::thread([this] { server_.listen_after_bind(); });
        for (int i = 0; i < 2; ++i)
            sender_threads_.emplace_back([this] { sender_loop(); });
        loop_thread_ = std::thread([this] { loop(); });

        enqueue([this](protocol::Effects& fx) { node_.start(wall_now(), fx); });
    }

    void stop() {
        bool was = running_.exchange(false);
        if (!was) return;
        server_.stop();
        cv_.notify_all();
        send_cv_.notify_all();
        if (loop_thread_.joinable()) loop_thread_.join();
        if (server_thread_.joinable()) server_thread_.join();
        for (auto& t : sender_threads_)
            if (t.joinable()) t.join();
    }

    void wait() {
        if (loop_thread_.joinable()) loop_thread_.join();
    }

  private:
    using Task = std::function<void(protocol::Effects&)>;

    void enqueue(Task task) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            inbox_.push_back(std::move(task));
        }
        cv_.notify_one();
    }

    template <typename R, typename Fn>
    R call(Fn&& fn) {
        std::promise<R> done;
        auto fut = done.get_future();
        enqueue([&done, fn = std::forward<Fn>(fn)](protocol::Effects& fx) mutable {
            done.set_value(fn(fx));
        });
        return fut.get();
    }

    protocol::JobResult run_job(const std::function<uint64_t(protocol::Effects&)>& begin) {
        uint64_t id = call<uint64_t>(begin);
        for (;;) {
            auto res = call<protocol::JobResult>([&](protocol::Effects&) {
                const protocol::JobResult* r = node_.job(id);
                return r ? *r : protocol::JobResult{};
            });
            if (res.state != protocol::JobState::Running) return res;
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
    }

    void loop() {
        while (running_) {
            Task task;
            double due_token_now = -1;
            uint64_t due_token = 0;
            {
                std::unique_lock<std::mutex> lk(mu_);
                auto wake = next_timer_due();
                if (inbox_.empty()) {
                    if (wake < 0) {
                        cv_.wait_for(lk, std::chrono::milliseconds(200));
                    } else {
                        double delay = wake - wall_now();
                        if (delay > 0)
                            cv_.wait_for(lk, std::chrono::duration<double>(std::min(delay, 0.2)));
                    }
                }
                if (!running_) return;
                if (!inbox_.empty()) {
                    task = std::move(inbox_.front());
                    inbox_.pop_front();
                } else if (!timers_.empty() && timers_.begin()->first <= wall_now()) {
                    due_token_now = timers_.begin()->first;
                    due_token = timers_.begin()->second;
                    timers_.erase(timers_.begin());
                }
            }
            protocol::Effects fx;
            if (task)
                task(fx);
            else if (due_token_now >= 0)
                node_.on_timer(due_token, wall_now(), fx);
            else
                continue;
            apply_effects(fx);
        }
    }

    double next_timer_due() {
        return timers_.empty() ? -1 : timers_.begin()->first;
    }

    void apply_effects(protocol::Effects& fx) {
        {
            std::lock_guard<std::mutex> lk(mu_);
            for (const auto& t : fx.timers) timers_.insert({wall_now() + t.delay, t.token});
        }
        if (!fx.sends.empty()) {
            std::lock_guard<std::mutex> lk(send_mu_);
            for (auto& s : fx.sends) {
                if (s.address.empty()) continue;
                outbox_.push_back({s.address, wire::encode_envelope(s.env)});
            }
        }
        send_cv_.notify_all();
    }

    void sender_loop() {
        while (running_) {
            std::pair<std::string, Bytes> item;
            {
                std::unique_lock<std::mutex> lk(send_mu_);
                send_cv_.wait_for(lk, std::chrono::milliseconds(200),
                                  [this] { return !outbox_.empty() || !running_; });
                if (!running_) return;
                if (outbox_.empty()) continue;
                item = std::move(outbox_.front());
                outbox_.pop_front();
            }
            try {
                auto [host, port] = split_address(item.first);
                httplib::Client cli(host, port);
                cli.set_connection_timeout(2, 0);
                cli.set_read_timeout(5, 0);
                cli.set_write_timeout(5, 0);
                cli.Post("/envelope", reinterpret_cast<const char*>(item.second.data()),
                         item.second.size(), "application/octet-stream");
                // at-most-once: failures are dropped, the protocol retries
            } catch (const std::exception&) {
            }
        }
    }

    protocol::Node node_;
    httplib::Server server_;
    std::thread server_thread_;
    std::thread loop_thread_;
    std::vector<std::thread> sender_threads_;
    std::atomic<bool> running_{true};

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Task> inbox_;
    std::multimap<double, uint64_t> timers_;

    std::mutex send_mu_;
    std::condition_variable send_cv_;
    std::deque<std::pair<std::string, Bytes>> outbox_;
};

}  // namespace entropy::net
