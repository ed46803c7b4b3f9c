import { buildConsole } from "./panels.js";
import { ConsoleStore } from "./store.js";
import { GatewayClient, SocketLike } from "./socket.js";
import { debounced, Dispatch } from "./clicks.js";
import { ClientCommand } from "./protocol.js";

function toast(text: string): void {
  const node = document.createElement("div");
  node.className = "toast";
  node.textContent = text;
  document.body.appendChild(node);
  setTimeout(() => node.remove(), 4000);
}

const store = new ConsoleStore();

// ?gateway=host:port lets the page be served separately from the gateway
const gatewayHost =
  new URLSearchParams(location.search).get("gateway") ?? location.host;

const client = new GatewayClient(
  `ws://${gatewayHost}/ws`,
  {
    onSnapshot: (frame) => store.apply(frame),
    onError: (error, detail) => toast(`${error}: ${detail}`),
    onStatus: (status) => store.setStatus(status),
  },
  // the browser socket matches SocketLike at runtime; its handler
  // properties are invariant in TS, hence the cast
  (url) => new WebSocket(url) as unknown as SocketLike,
);

// one retry on a failed send, then leave it to the operator
const sendOnce: Dispatch = (command: ClientCommand) => {
  store.markPending(command.target);
  if (client.send(command)) return;
  setTimeout(() => {
    if (!client.send(command)) toast("command not sent — gateway unreachable");
  }, 500);
};

const loadHistory = async (table: string) => {
  const response = await fetch(`http://${gatewayHost}/history/${table}`);
  if (!response.ok) throw new Error(`history ${table}: HTTP ${response.status}`);
  // the gateway wraps rows in {table, columns, rows}
  const payload = (await response.json()) as {
    rows: Array<Record<string, string>>;
  };
  return payload.rows;
};

const root = document.getElementById("app");
if (root === null) throw new Error("index.html must provide #app");
const consoleView = buildConsole(root, debounced(sendOnce), loadHistory);
store.subscribe(() => consoleView.update(store));
consoleView.update(store);
client.connect();
