#pragma once

// Every tunable number of the simulated world lives here.

namespace questforge::rules {

// Grid
inline constexpr int kWorldWidth = 64;   // x
inline constexpr int kWorldHeight = 48;  // y
inline constexpr int kWorldDepth = 64;   // z
inline constexpr int kVillageGroundY = 4;

// Island platform (24x24 at y=30, directly above the village)
inline constexpr int kIslandY = 30;
inline constexpr int kIslandMinX = 20;
inline constexpr int kIslandMaxX = 44;  // exclusive
inline constexpr int kIslandMinZ = 20;
inline constexpr int kIslandMaxZ = 44;  // exclusive

// Regions used for confinement and quest predicates.
inline constexpr int kVillageMaxY = 20;  // village region is y in [0, 20)
inline constexpr int kIslandMinRegionY = kIslandY;

// Combat
inline constexpr int kMobDamage = 2;
inline constexpr int kAttackDamage = 4;
inline constexpr int kSpiderHealth = 8;
inline constexpr int kZombieHealth = 12;
inline constexpr int kCreeperHealth = 10;
inline constexpr int kNpcHealth = 20;
inline constexpr int kPlayerHealth = 20;

// Ranges (euclidean, in blocks)
inline constexpr int kAggroRadius = 8;
inline constexpr int kMineRadius = 6;
inline constexpr int kAttackRange = 3;
inline constexpr int kTransferRange = 3;
inline constexpr int kChestRange = 4;
inline constexpr int kGuardRadius = 4;    // idle mobs stay this close to their post
inline constexpr int kArrivalRadius = 2;  // goToPlayer / followPlayer stop distance

// Movement
inline constexpr int kGoToPlayerMaxTicks = 50;
inline constexpr int kMaxStepUp = 1;
inline constexpr int kMaxDrop = 3;
inline constexpr int kWanderOneIn = 4;  // idle mob moves with probability 1/4 per tick

// Clock
inline constexpr int kDayLengthTicks = 600;  // day and night each last this long

}  // namespace questforge::rules
