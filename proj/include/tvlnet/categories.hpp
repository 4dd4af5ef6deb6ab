#pragma once

#include <map>
#include <string>

namespace tvlnet {

inline constexpr const char* kSectorOthers = "Others";

/// Default grouping of protocol categories into the six broad analytical
/// sectors. Mirrors config/sector_map.csv; a loaded file takes precedence.
inline const std::map<std::string, std::string>& default_category_sectors() {
    static const std::map<std::string, std::string> m = {
        {"Algo-Stables", "Asset Management"},
        {"Decentralized Stablecoin", "Asset Management"},
        {"Liquid Staking", "Asset Management"},
        {"Liquidity manager", "Asset Management"},
        {"Reserve Currency", "Asset Management"},
        {"Synthetics", "Asset Management"},
        {"Yield", "Asset Management"},
        {"Yield Aggregator", "Asset Management"},
        {"Bridge", "Trading & Exchanges"},
        {"CEX", "Trading & Exchanges"},
        {"DEX Aggregator", "Trading & Exchanges"},
        {"Cross Chain", "Trading & Exchanges"},
        {"Dexes", "Trading & Exchanges"},
        {"Derivatives", "Trading & Exchanges"},
        {"Options", "Trading & Exchanges"},
        {"Options Vault", "Trading & Exchanges"},
        {"NFT Marketplace", "Trading & Exchanges"},
        {"CDP", "Lending, Borrowing & Real World Assets"},
        {"Lending", "Lending, Borrowing & Real World Assets"},
        {"Leveraged Farming", "Lending, Borrowing & Real World Assets"},
        {"NFT Lending", "Lending, Borrowing & Real World Assets"},
        {"RWA Lending", "Lending, Borrowing & Real World Assets"},
        {"Uncollateralized Lending", "Lending, Borrowing & Real World Assets"},
        {"RWA", "Lending, Borrowing & Real World Assets"},
        {"Liquidity Restaking", "Lending, Borrowing & Real World Assets"},
        {"Restaking", "Lending, Borrowing & Real World Assets"},
        {"Chain", "Infrastructure, Services & Financial Products"},
        {"Infrastructure", "Infrastructure, Services & Financial Products"},
        {"Oracle", "Infrastructure, Services & Financial Products"},
        {"Payments", "Infrastructure, Services & Financial Products"},
        {"Services", "Infrastructure, Services & Financial Products"},
        {"Farm", "Infrastructure, Services & Financial Products"},
        {"Gaming", "Infrastructure, Services & Financial Products"},
        {"Indexes", "Infrastructure, Services & Financial Products"},
        {"Insurance", "Infrastructure, Services & Financial Products"},
        {"Launchpad", "Infrastructure, Services & Financial Products"},
        {"Prediction Market", "Infrastructure, Services & Financial Products"},
        {"Staking Pool", "Infrastructure, Services & Financial Products"},
        {"Wallets", "Infrastructure, Services & Financial Products"},
        {"Privacy", "Privacy & Security"},
        {"SoFi", "Others"},
    };
    return m;
}

}  // namespace tvlnet
