import { ArenaClient } from "./api.js";
import { ArenaApp } from "./app.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const client = new ArenaClient();
  const app = new ArenaApp(root, client);
  let gameText: string | null = null;
  let strategyText: string | null = null;
  try {
    const config = await client.config();
    gameText = config.default_game_text;
    strategyText = config.default_strategy_text;
  } catch {
    // service without defaults; fall through to the builtin game
  }
  if (!gameText) gameText = await client.builtinLawnmower();
  await app.createSession({
    game_text: gameText,
    strategy_text: strategyText ?? undefined,
    synthesize: !strategyText,
  });
}

void boot();
