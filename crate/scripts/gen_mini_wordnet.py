#!/usr/bin/env python3
"""Generate the miniature WNDB noun database bundled for hermetic tests.

The taxonomy below is a hand-trimmed slice of the WordNet noun hierarchy
covering the TBP vocabulary, the 80 MSCOCO category names and a few deeper
hyponym subtrees. Output follows the standard WNDB layout (index.noun and
data.noun with byte-offset addressed synset lines), so the same reader works
against a full WordNet 3.x installation.

Usage: python3 scripts/gen_mini_wordnet.py crates/core/data/wordnet
"""

import sys
from pathlib import Path

# Indented outline: two spaces per level.
# "word1|word2 :: gloss". Children are hyponyms of their parent.
TAXONOMY = """
entity :: that which is perceived or known or inferred to have its own distinct existence
  organism|being :: a living thing that has the ability to act or function independently
    person|individual|someone :: a human being
      man|adult male :: an adult person who is male
      woman|adult female :: an adult female person
      child|kid :: a young person of either sex
    animal|animate being|beast :: a living organism characterized by voluntary movement
      bird :: warm-blooded egg-laying vertebrates with feathers and wings
        cock|rooster :: adult male chicken
        hen :: adult female chicken
        passerine|passeriform bird :: perching birds mostly small and living near the ground
          songbird|songster :: any bird having a musical call
            robin|redbreast :: small Old World songbird with a reddish breast
            sparrow|true sparrow :: small brownish songbird
            finch :: any of numerous small songbirds with short stout bills
            canary|canary bird :: any of several small Old World finches
          crow :: black birds having a raucous call
        bird of prey|raptor|raptorial bird :: any of numerous carnivorous birds that hunt and kill other animals
          hawk :: diurnal bird of prey typically having short rounded wings and a long tail
          eagle|bird of Jove :: any of various large keen-sighted diurnal birds of prey
            golden eagle :: large eagle of mountainous regions
            bald eagle|American eagle :: a large eagle of North America
            harpy|harpy eagle :: large black-and-white crested eagle
          falcon :: diurnal birds of prey having long pointed powerful wings
            peregrine|peregrine falcon :: a widely distributed falcon
            kestrel :: small falcon
          owl|bird of Minerva|hooter :: nocturnal bird of prey with hawk-like beak
            barn owl :: owl with a heart-shaped face
            horned owl :: any owl that has ear tufts
          vulture :: any of various large birds of prey having naked heads
        parrot :: usually brightly colored zygodactyl tropical birds
          macaw :: long-tailed brilliantly colored parrot
          cockatoo :: white or light-colored crested parrot
          parakeet|parroket :: any of numerous small slender long-tailed parrots
        aquatic bird :: wading and swimming and diving birds
          waterfowl|water bird :: freshwater aquatic bird
            duck :: small wild or domesticated web-footed broad-billed swimming bird
              mallard :: wild dabbling duck
            swan :: stately heavy-bodied aquatic bird with very long neck
            goose :: web-footed long-necked typically gregarious migratory aquatic birds
          penguin :: short-legged flightless birds of cold southern regions
          flamingo :: large pink web-footed bird with down-bent bill
        gallinaceous bird|gallinacean :: heavy-bodied largely ground-feeding domestic or game birds
          turkey :: large gallinaceous bird with fan-shaped tail
          peafowl|bird of Juno :: very large terrestrial southeast Asian pheasant
            peacock :: male peafowl
          chicken|domestic fowl :: a domesticated gallinaceous bird
        ratite|flightless bird :: flightless birds having flat breastbones
          ostrich :: fast-running African flightless bird
          emu :: large Australian flightless bird
      mammal :: any warm-blooded vertebrate having the skin more or less covered with hair
        feline|felid :: any of various lithe-bodied roundheaded fissiped mammals
          cat|true cat :: feline mammal usually having thick soft fur
            domestic cat|house cat :: any domesticated member of the genus Felis
              kitty|kitten :: young domestic cat
              tabby|tabby cat :: a cat with a grey or tawny coat mottled with black
              persian cat :: a long-haired breed of cat
              siamese cat|siamese :: a slender short-haired blue-eyed breed of cat
              maine coon :: a large long-haired breed of cat
            wildcat :: any small or medium-sized cat resembling the domestic cat
              lynx|catamount :: short-tailed wildcats with usually tufted ears
              ocelot :: nocturnal wildcat of Central America
          big cat :: any of several large cats typically able to roar
            lion|king of beasts :: large gregarious predatory feline of Africa and India
              lioness :: a female lion
              lion cub :: a young lion
            tiger :: large feline of forests in most of Asia
              bengal tiger :: a tiger of the Indian subcontinent
            leopard :: large feline of African and Asian forests
              snow leopard :: large feline of upland central Asia
            cheetah :: long-legged spotted cat of Africa
        canine|canid :: any of various fissiped mammals with nonretractile claws
          dog|domestic dog :: a member of the genus Canis
            puppy :: a young dog
            hunting dog :: a dog used in hunting game
              hound|hound dog :: any of several breeds of dog used for hunting
                beagle :: a small short-legged smooth-coated breed of hound
                dachshund :: small long-bodied short-legged German breed of dog
                greyhound :: a tall slender dog of an ancient breed
              terrier :: any of several usually small short-bodied breeds
                fox terrier :: a small lively black-and-white terrier
                schnauzer :: German breed of sturdy black or grey dog
              sporting dog|gun dog :: a dog trained to work with sportsmen
                retriever :: a dog with heavy water-resistant coat
                  golden retriever :: an English breed having a long silky golden coat
                  labrador retriever :: breed originally from Labrador having a short black or golden-brown coat
                spaniel :: any of several breeds of small to medium-sized gun dogs
            working dog :: any of several breeds of usually large powerful dogs
              shepherd dog|sheepdog :: any of various usually long-haired breeds
                german shepherd|alsatian :: breed of large shepherd dogs
                collie :: a silky-coated sheepdog
              sled dog|sledge dog :: a dog trained to draw a sled
                husky :: breed of heavy-coated Arctic sled dog
              dalmatian|coach dog :: a large breed having a smooth white coat with black or brown spots
            toy dog|toy :: any of several breeds of very small dogs kept purely as pets
              chihuahua :: an old breed of tiny short-haired dog
              pomeranian :: breed of very small compact long-haired dogs
            poodle|poodle dog :: an intelligent dog with a heavy curly solid-colored coat
            corgi|welsh corgi :: either of two Welsh breeds of long-bodied short-legged dogs
            pug|pug-dog :: small compact smooth-coated breed of Asiatic origin
          wolf :: any of various predatory carnivorous canine mammals
          fox :: alert carnivorous mammal with pointed muzzle and ears
        bear :: massive plantigrade carnivorous or omnivorous mammals
          brown bear|bruin :: large ferocious bear of Eurasia
            grizzly|grizzly bear|silvertip :: powerful brownish-yellow bear
            kodiak bear|kodiak :: a very large brown bear of Alaska
          american black bear|black bear :: brown to black North American bear
          polar bear|ice bear :: white bear of Arctic regions
          sloth bear :: common coarse-haired long-snouted bear of south-central Asia
          panda|giant panda :: large black-and-white herbivorous mammal of bamboo forests
        equine|equid :: hoofed mammals having slender legs and a flat coat
          horse|equus caballus :: solid-hoofed herbivorous quadruped domesticated since prehistoric times
            mare :: female equine animal
            stallion|entire :: uncastrated adult male horse
            foal :: a young horse
            pony :: any of various breeds of small gentle horses
              shetland pony :: breed of very small pony
            racehorse|race horse :: a horse bred for racing
              thoroughbred :: a racehorse belonging to a breed that originated from a cross between Arabian stallions and English mares
            draft horse|draught horse|dray horse :: horse adapted for drawing heavy loads
              clydesdale :: heavy feathered-legged breed of draft horse
            palomino :: a horse of light tan or golden color
          zebra :: any of several fleet black-and-white striped African equines
            grevy's zebra :: large zebra of northern Africa
          donkey|domestic ass :: domestic beast of burden descended from the African wild ass
        proboscidean|proboscidian :: massive herbivorous mammals having tusks and a long trunk
          elephant :: five-toed pachyderm
            african elephant :: an elephant native to Africa having enormous flapping ears
            indian elephant|asian elephant :: Asian elephant having high forehead and small ears
            rogue elephant :: a vicious elephant that has been separated from the herd
          mammoth :: any of numerous extinct elephants
        primate :: any placental mammal of the order Primates
          monkey :: any of various long-tailed primates
            old world monkey|catarrhine :: of Africa or Arabia or Asia
              baboon :: large terrestrial monkeys having doglike muzzles
              macaque :: short-tailed monkey of rocky regions of Asia and Africa
                rhesus|rhesus monkey :: a macaque of southern Asia
              mandrill :: baboon of west Africa with a bright red and blue face
            new world monkey|platyrrhine :: monkeys of Central and South America
              capuchin|ringtail :: monkey of Central and South America having thick hair on the head
              howler monkey|howler :: monkey of tropical South American forests
              spider monkey :: arboreal monkey of tropical America with long slender legs
              marmoset :: small soft-furred South American and Central American monkey
          ape :: any of various primates with short tails or no tail at all
            gorilla :: largest anthropoid ape
            chimpanzee|chimp :: intelligent somewhat arboreal ape of equatorial African forests
        ruminant :: any of various cud-chewing hoofed mammals
          bovine :: any of various members of the genus Bos
            cow :: mature female of mammals of which the male is called bull
              dairy cow|milch cow :: cow raised for milk
            ox :: adult castrated bull of the genus Bos
          sheep :: woolly usually horned ruminant mammal
            lamb :: young sheep
            ram|tup :: uncastrated adult male sheep
            merino|merino sheep :: a white sheep originating in Spain
          giraffe|camelopard :: tallest living quadruped
          deer|cervid :: distinguished from Bovidae by the male's having solid deciduous antlers
        rodent|gnawer :: relatively small placental mammals having a single pair of constantly growing incisor teeth
          mouse :: any of numerous small rodents typically resembling diminutive rats
            house mouse :: brownish-grey Old World mouse now a common household pest worldwide
            field mouse|fieldmouse :: any nocturnal Old World mouse inhabiting woodlands and fields
            harvest mouse :: small reddish-brown Eurasian mouse
            wood mouse :: a mouse inhabiting woodlands
          rat :: any of various long-tailed rodents
          squirrel :: a kind of arboreal rodent having a long bushy tail
          hamster :: short-tailed Old World burrowing rodent with large cheek pouches
        lagomorph|gnawing mammal :: relative large gnawing animals
          rabbit|coney|cony :: any of various burrowing animals of the family Leporidae
            eastern cottontail :: common rabbit of eastern United States
            swamp rabbit :: large rabbit of the southeastern United States
            european rabbit|old world rabbit :: common greyish-brown burrowing animal native to southern Europe
            angora|angora rabbit :: domestic breed of rabbit with long white silky hair
          hare :: swift timid long-eared mammal larger than a rabbit
      amphibian :: cold-blooded vertebrate typically living on land but breeding in water
        frog|toad|anuran :: any of various tailless stout-bodied amphibians
          true frog|ranid :: insectivorous usually semiaquatic web-footed amphibian
            bullfrog :: largest North American frog
            wood frog :: a common North American frog
            leopard frog :: a common North American green or brown frog having white-edged dark oval spots
          tree frog|tree-frog :: any frog of the family Hylidae
            red-eyed tree frog :: a brightly colored tree frog of Central America
          tailed frog :: a frog of the northwestern United States
          poison dart frog :: a brightly colored poisonous frog of South America
      reptile|reptilian :: any cold-blooded vertebrate of the class Reptilia
        turtle :: any of various aquatic and land reptiles having a bony shell
          sea turtle|marine turtle :: any of various large turtles with limbs modified into flippers
            green turtle :: large tropical turtle with greenish flesh
            loggerhead|loggerhead turtle :: very large carnivorous sea turtle
            leatherback|leatherback turtle :: wide-ranging large turtle of warm seas
          box turtle|box tortoise :: chiefly terrestrial turtle of North America
          snapping turtle :: large aggressive freshwater turtle with powerful jaws
          tortoise :: usually herbivorous land turtles having clawed elephant-like limbs
            giant tortoise :: very large tortoises of the Galapagos and Seychelles islands
        lizard :: relatively long-bodied reptile with usually two pairs of legs
        snake|serpent|ophidian :: limbless scaly elongate reptile
      fish :: any of various mostly cold-blooded aquatic vertebrates
    plant|flora|plant life :: a living organism lacking the power of locomotion
      pot plant|potted plant|houseplant :: a plant grown in a pot
        cactus :: any succulent plant of the family Cactaceae
        fern :: any of numerous flowerless and seedless vascular plants
        bonsai :: a dwarfed ornamental tree or shrub grown in a tray
      tree :: a tall perennial woody plant
      flower :: a plant cultivated for its blooms
  artifact|artefact :: a man-made object taken as a whole
    conveyance|transport :: something that serves as a means of transportation
      vehicle :: a conveyance that transports people or objects
        wheeled vehicle :: a vehicle that moves on wheels
          bicycle|bike|wheel|cycle :: a wheeled vehicle that has two wheels and is moved by foot pedals
            mountain bike|all-terrain bike|off-roader :: a bicycle with a sturdy frame and fat tires
              suspension fork :: front fork with shock absorbers fitted to a mountain bicycle
              downhill bike :: a heavy mountain bicycle built for descending
            road bike|racing bicycle :: a lightweight bicycle with drop handlebars
              time trial bike :: an aerodynamic road bicycle
            bicycle-built-for-two|tandem bicycle|tandem :: a bicycle with two sets of pedals and two seats
            ordinary|ordinary bicycle|penny-farthing :: an early bicycle with a very large front wheel
            safety bicycle|safety bike :: bicycle that has two wheels of equal size
            velocipede :: any of several early bicycles with pedals on the front wheel
          motor vehicle|automotive vehicle :: a self-propelled wheeled vehicle that does not run on rails
            car|auto|automobile|motorcar :: a motor vehicle with four wheels
              ambulance :: a vehicle that takes people to and from hospitals
              cab|taxi|taxicab :: a car driven by a person whose job is to take passengers where they want to go
              convertible :: a car that has top that can be folded or removed
              coupe :: a car with two doors and front seats and a luggage compartment
              jeep|landrover :: a car suitable for traveling over rough terrain
              limousine|limo :: large luxurious car
              minivan :: a small box-shaped passenger van
              racer|race car|racing car :: a fast car that competes in races
              sedan|saloon :: a car that is closed and that has front and rear seats
              sports car|sport car :: a small low car with a high-powered engine
                roadster|runabout|two-seater :: an open automobile having a front seat and a rumble seat
            motorcycle|bike :: a motor vehicle with two wheels and a strong frame
              moped :: a motorbike that can be pedaled or driven by a low-powered gasoline engine
              scooter|motor scooter :: a wheeled vehicle with small wheels and a low-powered engine
            truck|motortruck :: an automotive vehicle suitable for hauling
              fire engine|fire truck :: any of various large trucks that carry firemen and equipment
              pickup|pickup truck :: a light truck with an open body and low sides
              tow truck|tow car|wrecker :: a truck equipped to hoist and pull wrecked cars
              dump truck|dumper :: truck whose contents can be emptied without handling
            bus|autobus|coach|motorcoach :: a vehicle carrying many passengers
              school bus :: a bus used to transport children to or from school
              minibus :: a light bus
              trolleybus|trolley coach :: a passenger bus with an electric motor that draws power from overhead wires
          skateboard :: a board with wheels that is ridden in a standing or crouching position
        craft :: a vehicle designed for navigation in or on water or air
          airplane|aeroplane|plane :: an aircraft that has a fixed wing and is powered by propellers or jets
            airliner :: a commercial airplane that carries passengers
            jet|jet plane :: an airplane powered by one or more jet engines
            seaplane|hydroplane :: an airplane that can land on or take off from water
            biplane :: old fashioned airplane that has two wings one above the other
          boat :: a small vessel for travel on water
            sailboat|sailing boat :: a small sailing vessel
            canoe :: small and light boat
            rowboat :: a small boat of shallow draft with oars
            motorboat|powerboat :: a boat propelled by an internal-combustion engine
            gondola :: long narrow flat-bottomed boat propelled by sculling
        train|railroad train :: public transport provided by a line of railway cars coupled together
          freight train|rattler :: a railroad train consisting of freight cars
          passenger train :: a train that carries passengers
          bullet train|bullet :: a high-speed passenger train
      sled|sledge :: a vehicle mounted on runners
    structure|construction :: a thing constructed
      bench :: a long seat for more than one person
        park bench :: a bench in a public park
        pew|church bench :: long bench with backs
        settle|settee :: a long wooden bench with a back
      traffic light|traffic signal|stoplight :: a visual signal to control the flow of traffic
      fire hydrant|fireplug|hydrant :: an upright hydrant for drawing water to use in fighting fires
      stop sign :: a traffic sign notifying drivers that they must come to a complete stop
      parking meter :: a coin-operated timer located next to a parking space
    furniture|piece of furniture :: furnishings that make a room or other area ready for occupancy
      chair :: a seat for one person, with a support for the back
        armchair :: chair with a support on each side for arms
        rocking chair|rocker :: a chair mounted on rockers
        folding chair :: a chair that can be folded flat for storage
        highchair|feeding chair :: a chair for feeding a very young child
        wheelchair :: a movable chair mounted on large wheels
        swivel chair :: a chair that swivels on its base
        windsor chair :: a wooden chair with a back of many spindles
        barber chair :: a chair for a barber's customers
      couch|sofa|lounge :: an upholstered seat for more than one person
        chesterfield :: a sofa with upholstered arms and back
        loveseat :: small sofa that seats two people
        futon :: mattress consisting of a pad of cotton batting that is used for sleeping on the floor or on a raised frame
      bed :: a piece of furniture that provides a place to sleep
        bunk bed|bunk :: beds built one above the other
        four-poster :: a bed with posts at the four corners
        crib|cot :: baby bed with high sides made of slats
        hammock|sack :: a hanging bed of canvas or rope netting
      table :: a piece of furniture having a smooth flat top
        dining table|board :: a table at which meals are served
          refectory table :: a long narrow dining table supported by a stretcher between two trestles
          drop-leaf table :: a dining table with hinged leaves
      toilet|can|commode :: a room or building equipped with one or more toilets
    container :: any object that can be used to hold things
      bag :: a flexible container with a single opening
        backpack|back pack|knapsack|packsack|rucksack|haversack :: a bag carried by a strap on your back or shoulder
          daypack :: a small backpack for day trips
        suitcase|traveling bag|travelling bag|grip :: a portable rectangular container for carrying clothes
          carpetbag :: traveling bag made of carpet
          gladstone|gladstone bag :: a light travelling bag that opens into two equal compartments
          overnighter|overnight bag|overnight case :: a small traveling bag to carry clothing and accessories for staying overnight
          portmanteau|gladstone portmanteau :: a large travelling bag made of stiff leather
        handbag|purse|pocketbook :: a container used for carrying money and small personal items
          clutch bag|clutch :: a woman's strapless purse that is carried in the hand
          shoulder bag :: a handbag that is carried by a strap over the shoulder
          tote bag|tote :: a capacious bag or basket
      vessel :: an object used as a container for liquids
        bowl :: a round vessel that is open at the top
          mixing bowl :: bowl used with an electric mixer
          punch bowl :: a large bowl for serving beverages
          salad bowl :: a large bowl for mixing and serving a salad
          soup bowl :: a bowl for serving soup
        bottle :: a glass or plastic vessel used for storing drinks
          wine bottle :: a bottle for holding wine
          water bottle :: a bottle for holding water
          beer bottle :: a bottle for holding beer
        cup :: a small open container usually used for drinking
          teacup :: a cup from which tea is drunk
          coffee cup :: a cup from which coffee is drunk
          mug :: with handle and usually cylindrical
        vase :: an open jar of glass or porcelain used as an ornament or to hold flowers
          amphora :: an ancient jar with two handles
          urn :: a large vase that usually has a pedestal or feet
        wine glass :: a glass that has a stem and in which wine is served
          champagne flute|flute :: a tall narrow wineglass
          goblet :: a drinking glass with a base and stem
    device :: an instrumentality invented for a particular purpose
      clock :: a timepiece that shows the time of day
        alarm clock|alarm :: a clock that wakes a sleeper at some preset time
        cuckoo clock :: a clock that announces the hours with a sound like the call of the cuckoo
        grandfather clock|longcase clock :: a pendulum clock enclosed in a tall narrow case
        wall clock :: a clock mounted on a wall
        atomic clock :: a timepiece that derives its time scale from the vibration of atoms
        digital clock :: a clock that displays the time of day digitally
        analog clock :: a clock that displays the time of day by the position of hands on a dial
      camera|photographic camera :: equipment for taking photographs
        box camera|box brownie :: a simple camera shaped like a rectangular box
        digital camera :: a camera that encodes an image digitally
        polaroid camera|polaroid :: a camera that develops and produces a positive print within seconds
        reflex camera :: camera that allows the photographer to view and focus the exact scene
          single-lens reflex|slr camera :: a reflex camera that uses the same lens for viewing and taking
          twin-lens reflex :: a reflex camera with two lenses
        television camera|tv camera :: television equipment consisting of a lens system
        movie camera|cine-camera :: a camera that takes a sequence of photographs
        pinhole camera :: a camera with a pinhole in place of a lens
      umbrella :: a canopy designed to protect a person from rain
        parasol|sunshade :: a handheld collapsible source of shade
        beach umbrella :: a large umbrella used on a beach
        golf umbrella :: a very large umbrella
      balloon :: large tough nonrigid bag filled with gas or heated air
        hot-air balloon :: balloon for travel through the air in a basket suspended below
        barrage balloon :: a large balloon with a net or cable attached
        weather balloon|meteorological balloon :: a balloon that carries instruments into the atmosphere
        toy balloon :: a small balloon filled with air or helium
      kite :: plaything consisting of a light frame covered with tissue paper
        box kite :: a kite in the shape of a box
      electronic equipment :: equipment that involves the controlled conduction of electrons
        tv|television|television receiver|television set :: an electronic device that receives television signals
          flat screen :: a television with a flat display
        laptop|laptop computer :: a portable computer small enough to use in your lap
          notebook|notebook computer :: a small compact portable computer
          netbook :: a very small laptop
        cell phone|cellular telephone|cellphone|mobile phone :: a hand-held mobile radiotelephone
          smartphone :: a cellular telephone with built-in applications
        remote|remote control :: a device that can be used to control a machine from a distance
        keyboard :: device consisting of a set of keys on a piano or organ or typewriter
          computer keyboard :: a keyboard that is a data input device for computers
      home appliance|household appliance :: an appliance that does a particular job in the home
        microwave|microwave oven :: kitchen appliance that cooks food by passing an electromagnetic wave through it
        oven :: kitchen appliance used for baking or roasting
          dutch oven :: an oven consisting of a metal box for cooking in front of a fire
          toaster oven :: a small electric oven for toasting or warming food
        toaster :: a kitchen appliance for toasting bread
        refrigerator|icebox :: white goods in which food can be stored at low temperatures
          fridge-freezer :: a refrigerator with a separate freezer compartment
        hair drier|hair dryer|blow dryer :: a hand-held electric blower that can blow warm air onto the hair
      sink :: plumbing fixture consisting of a water basin fixed to a wall or floor
        kitchen sink :: a sink in a kitchen
        washbasin|basin|lavatory :: a bathroom sink that is permanently installed
      toothbrush :: small brush with a long handle
        electric toothbrush :: a toothbrush powered by electricity
      scissors|pair of scissors :: an edge tool having two crossed pivoting blades
        shears :: large scissors with strong blades
      pot :: metal or earthenware cooking vessel
    cutlery|eating utensil :: implements for eating food
      fork :: cutlery used for serving and eating food
        table fork :: a fork used for eating at table
        carving fork :: a large fork used in carving cooked meat
      knife :: edge tool used as a cutting instrument
        bread knife :: a knife with a serrated edge
        butter knife :: a small knife with a dull blade
        steak knife :: a sharp table knife used in eating steak
      spoon :: a piece of cutlery with a shallow bowl-shaped container and a handle
        teaspoon :: a small spoon used for stirring tea or coffee
        tablespoon :: a spoon larger than a dessert spoon
        soupspoon|soup spoon :: a spoon with a rounded bowl for eating soup
    sports equipment :: equipment needed to participate in a particular sport
      sports ball|ball :: round object that is hit or thrown or kicked in games
        football :: the inflated oblong ball used in playing American football
        soccer ball :: an inflated ball used in playing soccer
        basketball :: an inflated ball used in playing basketball
        tennis ball :: a ball about the size of a fist used in playing tennis
      baseball bat|lumber :: an implement used in baseball by the batter
      baseball glove|glove|baseball mitt|mitt :: the handwear used by fielders in playing baseball
        catcher's mitt :: a glove used by the catcher
      tennis racket|tennis racquet :: a racket used to play tennis
      skis|ski :: narrow wood or metal or plastic runners used in pairs for gliding over snow
        cross-country ski :: a ski designed for cross-country skiing
      snowboard :: a board that resembles a broad ski or a small surfboard
      surfboard|surfing board :: a narrow buoyant board for riding surf
        longboard :: a long surfboard
      frisbee :: a light plastic disk about 8-10 inches in diameter
    clothing|article of clothing|wear :: a covering designed to be worn on a person's body
      tie|necktie :: neckwear consisting of a long narrow piece of material
        bow tie|bow-tie|bowtie :: a man's tie that ties in a bow
        ascot :: a wide scarf worn about the neck
      crown|diadem :: an ornamental jeweled headdress signifying sovereignty
        coronet :: a small crown
        tiara :: a jeweled headdress worn by women on formal occasions
        papal crown|triple crown :: the crown worn by the Pope
    book|volume :: physical objects consisting of a number of pages bound together
      notebook :: a book with blank pages for recording notes or memoranda
      cookbook|cookery book :: a book of recipes and cooking directions
      textbook|text|schoolbook :: a book prepared for use in schools or colleges
      picture book :: a book consisting chiefly of pictures
    weapon|arm :: any instrument or instrumentality used in fighting or hunting
      bow :: a weapon for shooting arrows
        longbow :: a powerful wooden bow drawn by hand
        crossbow :: a bow fixed transversely on a wooden stock
        compound bow :: a bow with pulleys that reduce the holding weight
      sword|blade|brand|steel :: a cutting or thrusting weapon that has a long metal blade
  food|solid food :: any solid substance that is used as a source of nourishment
    edible fruit :: edible reproductive body of a seed plant
      apple :: fruit with red or yellow or green skin and sweet to tart crisp whitish flesh
        eating apple|dessert apple :: an apple used primarily for eating raw
          granny smith :: apple with a green skin and hard tart flesh
          mcintosh :: early-ripening apple popular in the northeastern United States
          delicious :: variety of sweet eating apples
            golden delicious :: a variety of Delicious with pale yellow skin
            red delicious :: a variety of Delicious with dark red skin
          pippin :: any of numerous varieties of crisp apples
        cooking apple :: an apple used primarily in cooking for pies and applesauce
          bramley's seedling :: a very large cooking apple
        crab apple|crabapple :: any of numerous wild apple trees
      banana :: elongated crescent-shaped yellow fruit with soft sweet flesh
        plantain :: a banana tree bearing hanging clusters of edible angular greenish starchy fruits
        red banana :: a banana with reddish skin
      orange :: round yellow to orange fruit of any of several citrus trees
        navel orange :: seedless orange enclosing a small secondary fruit at the apex
        blood orange :: sweet almost spherical orange with dark red flesh
        mandarin|mandarin orange :: a somewhat flat reddish-orange loose skinned citrus
        temple orange :: large sweet juicy hybrid between tangerine and sweet orange
    vegetable|veg :: edible seeds or roots or stems or leaves of a plant
      broccoli :: plant with dense clusters of tight green flower buds
        broccoli rabe :: a vegetable with leafy stalks and small flower buds
      carrot :: orange root; important source of carotene
        baby carrot :: a small tender carrot
    baked goods :: foods that are combined and baked
      cake :: baked goods made from or based on a mixture of flour, sugar, eggs, and fat
        angel cake|angel food cake :: a light sponge cake made without egg yolks
        cheesecake :: made with sweetened cream cheese and eggs and cream
        chocolate cake :: cake containing chocolate
        cupcake :: small cake baked in a muffin tin
        layer cake :: a cake having layers
        fruitcake :: a rich cake containing dried fruit and nuts
      donut|doughnut|sinker :: a small ring-shaped friedcake
        cruller|twister :: small friedcake formed into a twisted strip
        jelly doughnut|bismark :: a raised doughnut filled with jelly
        raised doughnut :: a doughnut made with yeast
      pizza|pizza pie :: Italian open pie made of thin bread dough spread with a spiced mixture
        margherita :: pizza with tomatoes and mozzarella
        pepperoni pizza :: pizza topped with pepperoni
        calzone :: a pizza folded over its filling
    dish :: a particular item of prepared food
      sandwich :: two or more slices of bread with a filling between them
        club sandwich|three-decker :: a sandwich made with three slices of bread
        hamburger|burger :: a sandwich consisting of a fried cake of minced beef
        submarine|sub|hoagie|hero :: a large sandwich made of a long crusty roll split lengthwise
        blt :: a sandwich with bacon, lettuce and tomato
      hot dog|frank|frankfurter :: a frankfurter served hot on a bun
        corn dog :: frankfurter baked in cornbread
        chili dog :: a hotdog with chili con carne on it
"""



def parse(outline):
    nodes = []  # (depth, words, gloss)
    for raw in outline.splitlines():
        if not raw.strip():
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        assert indent % 2 == 0, raw
        body = raw.strip()
        words, gloss = body.split(" :: ", 1)
        nodes.append((indent // 2, [w.strip() for w in words.split("|")], gloss.strip()))
    parents = []
    stack = []
    for i, (depth, _, _) in enumerate(nodes):
        while stack and nodes[stack[-1]][0] >= depth:
            stack.pop()
        parents.append(stack[-1] if stack else None)
        stack.append(i)
    return nodes, parents


HEADER = [
    "  1 This is a miniature WordNet-format noun database for hermetic tests.",
    "  2 Synsets, glosses and pointers follow the WNDB file layout.",
    "  3 Content is a trimmed slice of the Princeton WordNet noun hierarchy.",
]


def build(outdir):
    nodes, parents = parse(TAXONOMY)
    children = [[] for _ in nodes]
    for i, p in enumerate(parents):
        if p is not None:
            children[p].append(i)

    def line_for(i, offsets):
        depth, words, gloss = nodes[i]
        parts = [f"{offsets[i]:08d}", "05", "n", f"{len(words):02x}"]
        for w in words:
            parts += [w.replace(" ", "_"), "0"]
        ptrs = []
        if parents[i] is not None:
            ptrs.append(("@", parents[i]))
        for c in children[i]:
            ptrs.append(("~", c))
        parts.append(f"{len(ptrs):03d}")
        for sym, j in ptrs:
            parts += [sym, f"{offsets[j]:08d}", "n", "0000"]
        return " ".join(parts) + " | " + gloss + "  \n"

    header = "".join(h + "\n" for h in HEADER)
    # Offsets depend on line lengths, which depend on offsets only through
    # fixed-width fields, so one sizing pass is exact.
    offsets = [0] * len(nodes)
    pos = len(header.encode())
    for i in range(len(nodes)):
        offsets[i] = pos
        pos += len(line_for(i, [0] * len(nodes)).encode())
    data = header + "".join(line_for(i, offsets) for i in range(len(nodes)))
    for i in range(len(nodes)):
        assert data.encode()[offsets[i]:].startswith(f"{offsets[i]:08d}".encode())

    index = {}
    for i, (_, words, _) in enumerate(nodes):
        for w in words:
            key = w.lower().replace(" ", "_")
            index.setdefault(key, []).append(i)
    lines = []
    for lemma in sorted(index):
        senses = index[lemma]
        syms = set()
        for i in senses:
            if parents[i] is not None:
                syms.add("@")
            if children[i]:
                syms.add("~")
        syms = sorted(syms)
        parts = [lemma, "n", str(len(senses)), str(len(syms)), *syms, str(len(senses)), "0"]
        parts += [f"{offsets[i]:08d}" for i in senses]
        lines.append(" ".join(parts) + "  \n")

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "data.noun").write_text(data)
    (outdir / "index.noun").write_text(header + "".join(lines))
    print(f"{len(nodes)} synsets, {len(index)} index entries -> {outdir}")


if __name__ == "__main__":
    build(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/wordnet")
