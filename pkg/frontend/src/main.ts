/**
 * Entry point.  The session to judge comes from the query string:
 *
 *   /ui/?session=<id>           same-origin deployment (served by the API)
 *   /ui/?session=<id>&api=URL   console served elsewhere
 */

import { VerifyApi } from "./api.js";
import { SessionMachine } from "./machine.js";
import { ConsoleUi } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const sessionId = params.get("session");
const root = document.getElementById("app");

if (!root) {
  throw new Error("missing #app container");
}

if (!sessionId) {
  root.textContent = "No session given. Open /ui/?session=<id>.";
} else {
  const api = new VerifyApi(params.get("api") ?? "");
  const machine = new SessionMachine(api, sessionId, () => performance.now());
  const ui = new ConsoleUi(root, api, machine);
  ui.mount()
    .then(() => ui.attachHotkeys(window))
    .catch((err: unknown) => {
      root.textContent = `Failed to load session ${sessionId}: ${String(err)}`;
    });
}
