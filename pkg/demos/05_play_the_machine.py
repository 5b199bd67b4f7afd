"""Drive the game server in-process: a scripted human loses to the machine.

The server computes a winning strategy up front and replays it schematically:
whatever terms the human types, the machine's answers are the strategy's
moves with the human's terms substituted through.
"""
from fastapi.testclient import TestClient

from dialogic.server import create_app

client = TestClient(create_app())

created = client.post("/v1/sessions", json={
    "formula": "forall x. (a(x) & b(x)) -> (forall x. a(x)) & (forall x. b(x))"})
session = created.json()
print("session", session["id"][:8], "| machine strategy found:",
      session["machine_strategy_found"])

round_no = 0
while session["status"] == "awaiting_human":
    options = client.get(f"/v1/sessions/{session['id']}/moves").json()["moves"]
    choice = options[-1]
    move = choice["move"]
    if choice["open_term"]:
        move = {**move, "content": {**move["content"], "term": "my_pet_term"}}
    round_no += 1
    print(f"round {round_no}: human plays: {choice['description']}")
    session = client.post(f"/v1/sessions/{session['id']}/moves",
                          json={"move": move}).json()

print("\nfinal status:", session["status"])
print("transcript length:", len(session["game"]["moves"]), "moves")
for i, m in enumerate(session["game"]["moves"]):
    who = "P" if i % 2 == 0 else "O"
    print(f"  {i}. {who} {m['polarity']} {m['content']}  ->{m['enabler']}")
