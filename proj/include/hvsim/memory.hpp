#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>

namespace hvsim {

constexpr uint64_t kDefaultMemBase = 0x8000'0000;
constexpr uint64_t kDefaultMemSize = 256ull << 20;
constexpr uint64_t kDefaultExitAddr = 0x8000'1000;
constexpr unsigned kPhysAddrBits = 56;

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Byte-addressable RAM backed by lazily allocated 4 KiB pages.
class PhysicalMemory {
 public:
  explicit PhysicalMemory(uint64_t base = kDefaultMemBase, uint64_t size = kDefaultMemSize);

  uint64_t base() const { return base_; }
  uint64_t size() const { return size_; }
  bool contains(uint64_t addr, unsigned len) const;

  /// Little-endian access of 1, 2, 4 or 8 bytes. The range must be contained.
  uint64_t read(uint64_t addr, unsigned len) const;
  void write(uint64_t addr, unsigned len, uint64_t value);

  void write_bytes(uint64_t addr, std::span<const uint8_t> bytes);
  void read_bytes(uint64_t addr, std::span<uint8_t> out) const;

  void clear() { pages_.clear(); }

 private:
  using Page = std::array<uint8_t, 4096>;
  uint8_t* page_for_write(uint64_t addr);
  const uint8_t* page_for_read(uint64_t addr) const;

  uint64_t base_;
  uint64_t size_;
  std::unordered_map<uint64_t, std::unique_ptr<Page>> pages_;
};

struct ExitStatus {
  bool pass = false;
  uint64_t code = 0;
};

/// Test-exit MMIO register: 1 means pass, odd v>1 means fail((v-1)/2).
struct ExitDevice {
  uint64_t address = kDefaultExitAddr;
  std::optional<uint64_t> last_write;
  std::optional<ExitStatus> status;

  bool covers(uint64_t addr, unsigned len) const { return addr < address + 8 && address < addr + len; }
  void store(uint64_t addr, uint64_t value);
  void reset()
  {
    last_write.reset();
    status.reset();
  }
};

/// RAM plus the exit device. The device shadows RAM at its address.
class Bus {
 public:
  Bus(uint64_t base = kDefaultMemBase, uint64_t size = kDefaultMemSize, uint64_t exit_addr = kDefaultExitAddr)
      : ram_(base, size)
  {
    exit_.address = exit_addr;
  }

  PhysicalMemory& ram() { return ram_; }
  const PhysicalMemory& ram() const { return ram_; }
  ExitDevice& exit_device() { return exit_; }
  const ExitDevice& exit_device() const { return exit_; }

  /// Data load. Returns nullopt on an access fault.
  std::optional<uint64_t> load(uint64_t addr, unsigned len) const;
  /// Instruction fetch or page-table read: RAM only.
  std::optional<uint64_t> load_ram(uint64_t addr, unsigned len) const;
  /// Data store. Returns false on an access fault.
  bool store(uint64_t addr, unsigned len, uint64_t value);

  void load_image(std::span<const uint8_t> bytes, uint64_t addr);
  void load_image_file(const std::filesystem::path& path, uint64_t addr);

 private:
  PhysicalMemory ram_;
  ExitDevice exit_;
};

}  // namespace hvsim
