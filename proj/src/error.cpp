#include "molecuforge/error.hpp"

namespace molecuforge {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownElement: return "UnknownElement";
        case ErrorCode::NoSuchAtom: return "NoSuchAtom";
        case ErrorCode::NoSuchSlot: return "NoSuchSlot";
        case ErrorCode::NoSuchBond: return "NoSuchBond";
        case ErrorCode::UnsupportedValency: return "UnsupportedValency";
        case ErrorCode::NotBonded: return "NotBonded";
        case ErrorCode::DegeneratePositions: return "DegeneratePositions";
        case ErrorCode::SlotOccupied: return "SlotOccupied";
        case ErrorCode::SameComponent: return "SameComponent";
        case ErrorCode::AtomGrabbed: return "AtomGrabbed";
        case ErrorCode::AlreadyGrabbing: return "AlreadyGrabbing";
        case ErrorCode::AnchorGrabbed: return "AnchorGrabbed";
        case ErrorCode::NoActiveGrab: return "NoActiveGrab";
        case ErrorCode::NoFreeSlot: return "NoFreeSlot";
        case ErrorCode::AlreadyBonded: return "AlreadyBonded";
        case ErrorCode::SelfBond: return "SelfBond";
        case ErrorCode::BondInCycle: return "BondInCycle";
        case ErrorCode::NotAnEndpoint: return "NotAnEndpoint";
        case ErrorCode::InvalidWorkspace: return "InvalidWorkspace";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ConsistencyError: return "ConsistencyError";
        case ErrorCode::UnknownCommand: return "UnknownCommand";
        case ErrorCode::BadArguments: return "BadArguments";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::BindError: return "BindError";
    }
    return "Unknown";
}

}  // namespace molecuforge
