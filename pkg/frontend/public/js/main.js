/** Studio entry point: wires vocab, editor, and the generation panel. */
import { ApiClient, ApiError } from "./api.js";
import { EditorCanvas } from "./editor.js";
import { GraphDraft } from "./graph.js";
import { GenerationSession } from "./session.js";
import { renderWireframe } from "./wireframe.js";
const client = new ApiClient();
const session = new GenerationSession();
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing element #${id}`);
    return node;
}
function setStatus(message, isError = false) {
    const status = el("status");
    status.textContent = message;
    status.className = isError ? "status error" : "status";
}
function metricBadges(layout) {
    const entries = [
        ["GUI-AGC", layout.metrics.gui_agc],
        ["CPI", layout.metrics.cpi],
        ["CCS", layout.metrics.ccs],
        ["Align", layout.metrics.alignment],
    ];
    return entries
        .map(([label, value]) => `<span class="badge">${label} ${value.toFixed(3)}</span>`)
        .join("");
}
async function init() {
    const vocab = await client.vocab();
    const classes = vocab.classes;
    const classIds = new Map(classes.map((c) => [c.name, c.id]));
    const containers = new Set(classes.filter((c) => c.container).map((c) => c.name));
    const classPicker = el("class-picker");
    for (const cls of classes) {
        const option = document.createElement("option");
        option.value = cls.name;
        option.textContent = cls.container ? `${cls.name} (container)` : cls.name;
        classPicker.appendChild(option);
    }
    const predicatePicker = el("predicate-picker");
    for (const predicate of vocab.predicates) {
        const option = document.createElement("option");
        option.value = predicate;
        option.textContent = predicate;
        predicatePicker.appendChild(option);
    }
    const draft = new GraphDraft(classIds.keys(), vocab.predicates);
    const canvas = el("editor");
    const editor = new EditorCanvas(canvas, draft, () => predicatePicker.value, classes);
    editor.onError = (message) => setStatus(message, true);
    const relationList = el("relations");
    function refresh() {
        relationList.innerHTML = "";
        for (const [index, rel] of draft.relations.entries()) {
            const item = document.createElement("li");
            const subjectName = draft.components.get(rel.s) ?? "?";
            const objectName = draft.components.get(rel.o) ?? "?";
            const picker = document.createElement("select");
            for (const predicate of vocab.predicates) {
                const option = document.createElement("option");
                option.value = predicate;
                option.textContent = predicate;
                option.selected = predicate === rel.p;
                picker.appendChild(option);
            }
            picker.addEventListener("change", () => {
                draft.setPredicate(index, picker.value);
                refresh();
            });
            const remove = document.createElement("button");
            remove.textContent = "x";
            remove.addEventListener("click", () => {
                draft.removeRelation(index);
                refresh();
            });
            item.append(`${subjectName}[${rel.s}] `, picker, ` ${objectName}[${rel.o}] `, remove);
            relationList.appendChild(item);
        }
        editor.draw();
        const errors = draft.validate();
        if (errors.length) {
            setStatus(errors[0], true);
        }
        else {
            setStatus(draft.dirty ? "draft edited; regenerate to refresh variants" : "ready");
        }
    }
    editor.onChange = refresh;
    el("add-component").addEventListener("click", () => {
        try {
            const id = draft.addComponent(classPicker.value);
            editor.placeNode(id);
            refresh();
        }
        catch (err) {
            setStatus(err.message, true);
        }
    });
    el("remove-component").addEventListener("click", () => {
        if (editor.selected !== null) {
            draft.removeComponent(editor.selected);
            editor.dropNode(editor.selected);
            refresh();
        }
    });
    const cards = el("cards");
    const pinnedSlot = el("pinned");
    function renderCards() {
        cards.innerHTML = "";
        const parents = draft.parentOf();
        session.variants.forEach((layout, index) => {
            const svg = renderWireframe(layout.boxes, parents, classIds, containers);
            const card = document.createElement("div");
            card.className = "card";
            card.innerHTML = `<div class="frame">${svg}</div><div class="badges">${metricBadges(layout)}</div>`;
            const pin = document.createElement("button");
            pin.textContent = "pin";
            pin.addEventListener("click", () => {
                session.pin(index, svg);
                renderPinned();
            });
            card.appendChild(pin);
            cards.appendChild(card);
        });
    }
    function renderPinned() {
        pinnedSlot.innerHTML = "";
        if (!session.pinned)
            return;
        const card = document.createElement("div");
        card.className = "card pinned-card";
        card.innerHTML =
            `<div class="frame">${session.pinned.svg}</div>` +
                `<div class="badges">${metricBadges(session.pinned.layout)}</div>`;
        const unpin = document.createElement("button");
        unpin.textContent = "unpin";
        unpin.addEventListener("click", () => {
            session.unpin();
            renderPinned();
        });
        card.appendChild(unpin);
        pinnedSlot.appendChild(card);
    }
    const generateButton = el("generate");
    generateButton.addEventListener("click", async () => {
        const errors = draft.validate();
        if (errors.length) {
            setStatus(errors[0], true);
            return;
        }
        if (draft.components.size === 0) {
            setStatus("add components first", true);
            return;
        }
        const samples = Number(el("samples").value) || 3;
        const temperature = Number(el("temperature").value) || 0.5;
        const seedRaw = el("seed").value.trim();
        generateButton.disabled = true;
        setStatus("generating...");
        try {
            const applied = await session.generate(client, draft.toDocument(), {
                samples,
                temperature,
                seed: seedRaw === "" ? undefined : Number(seedRaw),
            });
            if (applied) {
                draft.dirty = false;
                session.variants.length
                    ? setStatus(`generated ${session.variants.length} variants`)
                    : setStatus("no variants returned", true);
                renderCards();
            }
        }
        catch (err) {
            if (err instanceof ApiError) {
                setStatus(`${err.code}: ${err.message}`, true);
            }
            else {
                setStatus(err.message, true);
            }
        }
        finally {
            generateButton.disabled = false;
        }
    });
    refresh();
}
init().catch((err) => setStatus(`failed to load vocabulary: ${err}`, true));
