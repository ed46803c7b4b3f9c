import { commands, EmergencyKind } from "./protocol.js";
import { ConsoleStore, Snapshot } from "./store.js";
import { Dispatch } from "./clicks.js";

// One panel per subsystem. Static structure is built once; update()
// rewrites only the dynamic bits from the latest snapshots.

const APPLIANCES = ["fridge", "ac", "light1", "light2", "fan", "tv"];
const KINDS: EmergencyKind[] = ["fire", "police", "ambulance"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function panel(title: string, device: string): HTMLElement {
  const section = el("section", "panel");
  section.dataset.device = device;
  section.appendChild(el("h2", undefined, title));
  return section;
}

function button(label: string, onClick: () => void, className = ""): HTMLButtonElement {
  const node = el("button", className, label);
  node.addEventListener("click", onClick);
  return node;
}

function grid(rows: unknown): string {
  if (!Array.isArray(rows)) return "";
  return rows.map((row) => `|${row}|`).join("\n");
}

function renderHistory(
  table: HTMLTableElement,
  rows: Array<Record<string, string>>,
): void {
  table.textContent = "";
  if (rows.length === 0) return;
  const head = table.insertRow();
  for (const column of Object.keys(rows[0])) {
    head.appendChild(el("th", undefined, column));
  }
  for (const row of rows) {
    const tr = table.insertRow();
    for (const value of Object.values(row)) {
      tr.appendChild(el("td", undefined, value));
    }
  }
}

export interface Console {
  update(store: ConsoleStore): void;
}

/** Fetches one telemetry table from the gateway's history endpoint. */
export type HistoryLoader = (
  table: string,
) => Promise<Array<Record<string, string>>>;

export function buildConsole(
  root: HTMLElement,
  dispatch: Dispatch,
  loadHistory: HistoryLoader,
): Console {
  root.textContent = "";

  const banner = el("div", "banner hidden", "DISCONNECTED — reconnecting…");
  root.appendChild(banner);

  const header = el("header");
  const clock = el("span", "clock", "t=0 ms");
  header.appendChild(el("h1", undefined, "city operator console"));
  header.appendChild(clock);
  root.appendChild(header);

  const main = el("main");
  root.appendChild(main);

  // -- street lights -------------------------------------------------------
  const lights = panel("Street lights", "streetlight");
  const lightMode = el("span", "badge", "MANUAL");
  lights.appendChild(lightMode);
  const lampRow = el("div", "lamp-row");
  const lamps: HTMLElement[] = [];
  for (let i = 1; i <= 8; i++) {
    // a real button so the disconnected state can disable it
    const cell = el("button", "lamp off");
    cell.dataset.lamp = String(i);
    cell.textContent = String(i);
    lamps.push(cell);
    lampRow.appendChild(cell);
    // digit bytes latch one lamp to HIGH in manual mode
    cell.addEventListener("click", () => dispatch(commands.streetlightByte(String(i))));
  }
  lights.appendChild(lampRow);
  const lightButtons = el("div", "controls");
  lightButtons.appendChild(button("Automatic", () => dispatch(commands.streetlightByte("A"))));
  lightButtons.appendChild(button("All high", () => dispatch(commands.streetlightByte("H"))));
  lightButtons.appendChild(button("All dim", () => dispatch(commands.streetlightByte("D"))));
  lightButtons.appendChild(button("Flash", () => dispatch(commands.streetlightByte("F"))));
  lightButtons.appendChild(button("All off", () => dispatch(commands.streetlightByte("0"))));
  lights.appendChild(lightButtons);
  main.appendChild(lights);

  // -- home ------------------------------------------------------------------
  const home = panel("Home", "home");
  const toggles = new Map<string, HTMLButtonElement>();
  const toggleRow = el("div", "controls");
  for (const appliance of APPLIANCES) {
    const node = button(`${appliance}: OFF`, () => {
      const on = node.dataset.state !== "ON";
      dispatch(commands.applianceSet(appliance, on));
    }, "toggle");
    node.dataset.appliance = appliance;
    node.dataset.state = "OFF";
    toggles.set(appliance, node);
    toggleRow.appendChild(node);
  }
  home.appendChild(toggleRow);
  const armButton = button("Arm security", () => {
    dispatch(commands.doorArm(armButton.dataset.state !== "armed"));
  }, "arm");
  armButton.dataset.state = "disarmed";
  const doorState = el("span", "badge", "door CLOSED");
  const alarmBadge = el("span", "badge alarm hidden", "ALARM");
  home.appendChild(armButton);
  home.appendChild(doorState);
  home.appendChild(alarmBadge);
  main.appendChild(home);

  // -- traffic ----------------------------------------------------------------
  const traffic = panel("Traffic", "traffic");
  const signalRow = el("div", "signal-row");
  const signals: HTMLElement[] = [];
  for (let road = 1; road <= 4; road++) {
    const head = el("div", "signal off");
    head.dataset.road = String(road);
    head.textContent = String(road);
    signals.push(head);
    signalRow.appendChild(head);
  }
  traffic.appendChild(signalRow);
  const countdown = el("div", "countdown", "—");
  traffic.appendChild(countdown);
  const plateLine = el("div", "plate", "");
  traffic.appendChild(plateLine);
  main.appendChild(traffic);

  // -- parking -----------------------------------------------------------------
  const parking = panel("Parking", "parking");
  const slotRow = el("div", "slot-row");
  const slots: HTMLElement[] = [];
  for (let s = 1; s <= 4; s++) {
    const cell = el("div", "slot free");
    cell.dataset.slot = String(s);
    cell.textContent = String(s);
    slots.push(cell);
    slotRow.appendChild(cell);
  }
  parking.appendChild(slotRow);
  const availableLine = el("div", "available", "available: 4");
  const gateBadge = el("span", "badge", "gate CLOSED");
  const parkingLcd = el("pre", "lcd");
  parking.appendChild(availableLine);
  parking.appendChild(gateBadge);
  parking.appendChild(parkingLcd);
  main.appendChild(parking);

  // -- accident ----------------------------------------------------------------
  const accident = panel("Emergency", "accident");
  const buttonsRow = el("div", "controls");
  for (const kind of KINDS) {
    buttonsRow.appendChild(
      button(kind.toUpperCase(), () => dispatch(commands.emergency(kind)), `emergency ${kind}`),
    );
  }
  buttonsRow.appendChild(button("Reset", () => dispatch(commands.accidentReset()), "reset"));
  accident.appendChild(buttonsRow);
  const pumpBadge = el("span", "badge", "pump OFF");
  const sirenBadge = el("span", "badge", "alarm OFF");
  const counterLine = el("div", "counters", "fire 0 · police 0 · ambulance 0");
  const smsLog = el("ul", "sms-log");
  accident.appendChild(pumpBadge);
  accident.appendChild(sirenBadge);
  accident.appendChild(counterLine);
  accident.appendChild(smsLog);
  main.appendChild(accident);

  // -- notices -------------------------------------------------------------------
  const notice = panel("Info displays", "display");
  const noticeInput = el("input") as HTMLInputElement;
  noticeInput.placeholder = "notice text";
  const noticeSend = button("Post notice", () => {
    if (noticeInput.value.length > 0) {
      dispatch(commands.notice(noticeInput.value));
      noticeInput.value = "";
    }
  }, "post");
  const envGrid = el("pre", "lcd env-grid");
  const noticeGrid = el("pre", "lcd notice-grid");
  notice.appendChild(noticeInput);
  notice.appendChild(noticeSend);
  notice.appendChild(el("div", "caption", "environment board"));
  notice.appendChild(envGrid);
  notice.appendChild(el("div", "caption", "notice board"));
  notice.appendChild(noticeGrid);
  main.appendChild(notice);

  // -- telemetry history ------------------------------------------------------
  const history = panel("Telemetry", "history");
  const tableInput = el("input") as HTMLInputElement;
  tableInput.placeholder = "table, e.g. info_env";
  const historyStatus = el("div", "caption", "pick a table and load");
  const historyTable = el("table", "history-rows");
  const loadButton = button("Load", async () => {
    const table = tableInput.value.trim();
    if (table.length === 0) return;
    try {
      const rows = await loadHistory(table);
      renderHistory(historyTable, rows);
      historyStatus.textContent = `${table}: ${rows.length} rows`;
    } catch (err) {
      historyTable.textContent = "";
      historyStatus.textContent = err instanceof Error ? err.message : String(err);
    }
  }, "load");
  history.appendChild(tableInput);
  history.appendChild(loadButton);
  history.appendChild(historyStatus);
  history.appendChild(historyTable);
  main.appendChild(history);

  const allInputs = (): Array<HTMLButtonElement | HTMLInputElement> => [
    ...Array.from(root.querySelectorAll("button")),
    ...Array.from(root.querySelectorAll("input")),
  ];

  function update(store: ConsoleStore): void {
    clock.textContent = `t=${store.virtualMs} ms`;
    const disconnected = store.status !== "open";
    banner.classList.toggle("hidden", !disconnected);
    for (const node of allInputs()) node.disabled = disconnected;

    const light = store.snapshot("streetlight");
    if (light) {
      lightMode.textContent = String(light.mode ?? "");
      const levels = (light.levels as string[]) ?? [];
      lamps.forEach((lamp, i) => {
        const level = (levels[i] ?? "OFF").toLowerCase();
        lamp.className = `lamp ${level}`;
      });
    }

    const homeSnap = store.snapshot("home");
    if (homeSnap) {
      for (const appliance of APPLIANCES) {
        const state = String(homeSnap[appliance] ?? "OFF");
        const node = toggles.get(appliance)!;
        node.dataset.state = state;
        node.textContent = `${appliance}: ${state}`;
      }
    }
    const door = store.snapshot("door");
    if (door) {
      const armed = door.armed === true;
      armButton.dataset.state = armed ? "armed" : "disarmed";
      armButton.textContent = armed ? "Disarm security" : "Arm security";
      doorState.textContent = `door ${door.state}`;
      alarmBadge.classList.toggle("hidden", door.alarm !== "ON");
    }

    const trafficSnap = store.snapshot("traffic");
    if (trafficSnap) {
      const heads = trafficSnap.signals as Record<string, string>;
      signals.forEach((head, i) => {
        const state = (heads?.[String(i + 1)] ?? "OFF").toLowerCase();
        head.className = `signal ${state}`;
      });
      const ms = Number(trafficSnap.countdown_ms ?? 0);
      countdown.textContent =
        trafficSnap.green === 0 ? "all idle" : `road ${trafficSnap.green} green, ${(ms / 1000).toFixed(1)} s left`;
      const plate = trafficSnap.last_plate as Record<string, unknown> | null;
      plateLine.textContent = plate
        ? `last plate: ${plate.plate} (${plate.verdict})`
        : "";
    }

    const parkingSnap = store.snapshot("parking");
    if (parkingSnap) {
      const indicators = parkingSnap.indicators as Record<string, string>;
      slots.forEach((cell, i) => {
        const occupied = indicators?.[String(i + 1)] === "GREEN";
        cell.className = `slot ${occupied ? "occupied" : "free"}`;
      });
      availableLine.textContent = `available: ${parkingSnap.available}`;
      gateBadge.textContent = `gate ${parkingSnap.gate}`;
      parkingLcd.textContent = grid(parkingSnap.lcd);
    }

    const accidentSnap = store.snapshot("accident");
    if (accidentSnap) {
      pumpBadge.textContent = `pump ${accidentSnap.pump}`;
      sirenBadge.textContent = `alarm ${accidentSnap.alarm}`;
      const counters = accidentSnap.counters as Record<string, number>;
      counterLine.textContent = KINDS.map((k) => `${k} ${counters?.[k] ?? 0}`).join(" · ");
    }
    const sms = store.snapshot("sms");
    if (sms) {
      const inboxes = sms.inboxes as Record<string, Array<Record<string, unknown>>>;
      const delivered = Object.values(inboxes ?? {})
        .flat()
        .sort((a, b) => Number(a.delivered_at_ms) - Number(b.delivered_at_ms))
        .slice(-6);
      smsLog.textContent = "";
      for (const message of delivered) {
        smsLog.appendChild(
          el("li", undefined, `→${message.to}: ${message.body}`),
        );
      }
    }

    const displaySnap = store.snapshot("display") as Snapshot | undefined;
    if (displaySnap) {
      envGrid.textContent = grid(displaySnap.env);
      noticeGrid.textContent = grid(displaySnap.notice);
    }

    for (const section of Array.from(main.children) as HTMLElement[]) {
      const device = section.dataset.device ?? "";
      section.classList.toggle("pending", store.isPending(device));
    }
  }

  return { update };
}
